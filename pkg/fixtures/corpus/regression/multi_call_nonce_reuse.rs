use chacha20poly1305::{
    aead::{Aead, AeadCore, KeyInit, OsRng},
    ChaCha20Poly1305,
};

fn main() {
    let key = ChaCha20Poly1305::generate_key(&mut OsRng);
    let cipher = ChaCha20Poly1305::new(&key);
    let plaintext = b"sensitive payload";
    let associated_data = b"record header";

    let nonce = ChaCha20Poly1305::generate_nonce(&mut OsRng);
    let ciphertext = cipher
        .encrypt(&nonce, plaintext.as_ref())
        .expect("encryption failed!");

    // later in the program
    let ciphertext_with_aad = cipher
        .encrypt(&nonce, chacha20poly1305::aead::Payload {
            msg: plaintext,
            aad: associated_data,
        })
        .expect("encryption with AAD failed");

    println!("{} {}", ciphertext.len(), ciphertext_with_aad.len());
}
