use aes_gcm::{
    aead::{Aead, AeadCore, KeyInit, OsRng},
    Aes256Gcm,
};

pub fn encrypt_all(cipher: &Aes256Gcm, messages: &[String]) -> Result<Vec<Vec<u8>>, aes_gcm::Error> {
    let nonce = Aes256Gcm::generate_nonce(&mut OsRng);
    let mut out = Vec::new();
    for msg in messages {
        let ct = cipher.encrypt(&nonce, msg.as_bytes())?;
        out.push(ct);
    }
    Ok(out)
}
