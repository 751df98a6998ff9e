use aes_gcm::{
    aead::{Aead, KeyInit},
    Aes256Gcm, Nonce,
};

pub fn seal(key_material: &[u8], counter: u64, plaintext: &[u8]) -> Result<Vec<u8>, aes_gcm::Error> {
    let cipher = Aes256Gcm::new_from_slice(key_material).map_err(|_| aes_gcm::Error)?;
    let mut nonce_bytes = counter.to_be_bytes().to_vec();
    nonce_bytes.resize(12, 0);
    let nonce = Nonce::from_slice(&nonce_bytes);
    cipher.encrypt(nonce, plaintext)
}
