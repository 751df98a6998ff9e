use aes_gcm::{
    aead::{Aead, KeyInit, OsRng},
    Aes256Gcm, Key, Nonce,
};
use rand_core::RngCore;

pub fn seal(pt: &[u8]) -> Result<(Vec<u8>, Vec<u8>), aes_gcm::Error> {
    let mut key_bytes = [0u8; 32];
    OsRng.fill_bytes(&mut key_bytes);
    let key = Key::<Aes256Gcm>::from_slice(&key_bytes);
    let cipher = Aes256Gcm::new(key);

    let mut nonce = [0u8; 12];
    OsRng.fill_bytes(&mut nonce);
    let ciphertext = cipher.encrypt(Nonce::from_slice(&nonce), pt)?;
    let mut out = nonce.to_vec();
    out.extend_from_slice(&ciphertext);
    Ok((key_bytes.to_vec(), out))
}
