use aes_gcm::{
    aead::{Aead, AeadCore, KeyInit, OsRng},
    Aes256Gcm,
};

pub fn seal(plaintext: &[u8]) -> Result<Vec<u8>, aes_gcm::Error> {
    let key_bytes: [u8; 32] = [0x42; 32];
    let cipher = Aes256Gcm::new_from_slice(&key_bytes).map_err(|_| aes_gcm::Error)?;
    let nonce = Aes256Gcm::generate_nonce(&mut OsRng);
    cipher.encrypt(&nonce, plaintext)
}
