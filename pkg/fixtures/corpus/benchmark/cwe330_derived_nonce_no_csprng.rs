use chacha20poly1305::{
    aead::{Aead, KeyInit},
    ChaCha20Poly1305, Key, Nonce,
};

fn nonce_for(message_id: u32) -> [u8; 12] {
    let mut out = [0u8; 12];
    out[..4].copy_from_slice(&message_id.to_le_bytes());
    out
}

pub fn seal(key: &Key, message_id: u32, payload: &[u8]) -> Result<Vec<u8>, chacha20poly1305::Error> {
    let cipher = ChaCha20Poly1305::new(key);
    let nonce_bytes = nonce_for(message_id);
    cipher.encrypt(Nonce::from_slice(&nonce_bytes), payload)
}
