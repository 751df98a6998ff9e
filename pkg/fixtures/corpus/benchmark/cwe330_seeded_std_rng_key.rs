use aes_gcm::{
    aead::{Aead, AeadCore, KeyInit, OsRng},
    Aes256Gcm,
};
use rand::{rngs::StdRng, RngCore, SeedableRng};

fn session_cipher(session_id: u64) -> Result<Aes256Gcm, aes_gcm::Error> {
    let mut rng = StdRng::seed_from_u64(session_id);
    let mut key_bytes = [0u8; 32];
    rng.fill_bytes(&mut key_bytes);
    Aes256Gcm::new_from_slice(&key_bytes).map_err(|_| aes_gcm::Error)
}

fn main() -> Result<(), aes_gcm::Error> {
    let cipher = session_cipher(7)?;
    let nonce = Aes256Gcm::generate_nonce(&mut OsRng);
    let ciphertext = cipher.encrypt(&nonce, b"session data".as_ref())?;
    println!("{}", ciphertext.len());
    Ok(())
}
