use chacha20poly1305::{
    aead::{Aead, AeadCore, KeyInit, OsRng},
    ChaCha20Poly1305,
};

fn main() -> Result<(), chacha20poly1305::Error> {
    let key = [1u8; 32];
    let cipher = ChaCha20Poly1305::new(&key.into());
    let nonce = ChaCha20Poly1305::generate_nonce(&mut OsRng);
    let ciphertext = cipher.encrypt(&nonce, b"device token".as_ref())?;
    println!("{}", ciphertext.len());
    Ok(())
}
