use chacha20poly1305::{
    aead::{rand_core::RngCore, AeadInPlace, KeyInit, OsRng},
    ChaCha20Poly1305, Nonce,
};

pub fn seal_in_place(
    key: &chacha20poly1305::Key,
    buffer: &mut Vec<u8>,
) -> Result<[u8; 12], chacha20poly1305::Error> {
    let cipher = ChaCha20Poly1305::new(key);
    let mut nonce_bytes = [0u8; 12];
    OsRng.fill_bytes(&mut nonce_bytes);
    cipher.encrypt_in_place(Nonce::from_slice(&nonce_bytes), b"header", buffer)?;
    Ok(nonce_bytes)
}
