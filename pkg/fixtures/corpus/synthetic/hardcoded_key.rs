use aes_gcm::{
    aead::{Aead, AeadCore, KeyInit, OsRng},
    Aes256Gcm,
};

fn main() -> Result<(), aes_gcm::Error> {
    let secret: &[u8; 32] = b"0123456789abcdef0123456789abcdef";
    let cipher = Aes256Gcm::new(secret.into());
    let nonce = Aes256Gcm::generate_nonce(&mut OsRng);
    let ciphertext = cipher.encrypt(&nonce, b"payroll export".as_ref())?;
    println!("{} bytes", ciphertext.len());
    Ok(())
}
