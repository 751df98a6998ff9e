use aes_gcm::{
    aead::{Aead, KeyInit, OsRng},
    Aes256Gcm, Nonce,
};

pub fn seal(plaintext: &[u8]) -> Result<Vec<u8>, aes_gcm::Error> {
    let key = Aes256Gcm::generate_key(&mut OsRng);
    let cipher = Aes256Gcm::new(&key);
    let iv_text = String::from("fixed-iv-123");
    let iv: Vec<u8> = iv_text.into_bytes();
    let nonce = Nonce::from_slice(&iv);
    cipher.encrypt(nonce, plaintext)
}
