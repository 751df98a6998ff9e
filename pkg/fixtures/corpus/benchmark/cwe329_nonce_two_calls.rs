use aes_gcm::{
    aead::{Aead, AeadCore, KeyInit, OsRng},
    Aes256Gcm,
};

fn main() -> Result<(), aes_gcm::Error> {
    let key = Aes256Gcm::generate_key(&mut OsRng);
    let cipher = Aes256Gcm::new(&key);
    let nonce = Aes256Gcm::generate_nonce(&mut OsRng);
    let first = cipher.encrypt(&nonce, b"first record".as_ref())?;
    let second = cipher.encrypt(&nonce, b"second record".as_ref())?;
    println!("{} {}", first.len(), second.len());
    Ok(())
}
