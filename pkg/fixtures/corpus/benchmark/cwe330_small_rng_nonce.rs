use aes_gcm::{
    aead::{Aead, KeyInit, OsRng},
    Aes256Gcm, Nonce,
};
use rand::rngs::SmallRng;
use rand::{RngCore, SeedableRng};

fn main() -> Result<(), aes_gcm::Error> {
    let key = Aes256Gcm::generate_key(&mut OsRng);
    let cipher = Aes256Gcm::new(&key);
    let mut rng = SmallRng::from_entropy();
    let mut nonce_bytes = [0u8; 12];
    rng.fill_bytes(&mut nonce_bytes);
    let nonce = Nonce::from_slice(&nonce_bytes);
    let ciphertext = cipher.encrypt(nonce, b"attack at dawn".as_ref())?;
    println!("{}", ciphertext.len());
    Ok(())
}
