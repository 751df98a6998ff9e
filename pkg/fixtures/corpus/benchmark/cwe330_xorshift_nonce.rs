use chacha20poly1305::{
    aead::{Aead, KeyInit, OsRng},
    ChaCha20Poly1305, Nonce,
};
use rand_core::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;

fn main() -> Result<(), chacha20poly1305::Error> {
    let key = ChaCha20Poly1305::generate_key(&mut OsRng);
    let cipher = ChaCha20Poly1305::new(&key);
    let mut rng = XorShiftRng::from_seed([7u8; 16]);
    let mut nonce = [0u8; 12];
    rng.fill_bytes(&mut nonce);
    let ciphertext = cipher.encrypt(Nonce::from_slice(&nonce), b"telemetry".as_ref())?;
    println!("{}", ciphertext.len());
    Ok(())
}
