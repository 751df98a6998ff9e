use aes_gcm::{
    aead::{generic_array::GenericArray, Aead, AeadCore, KeyInit, OsRng},
    Aes256Gcm,
};

fn main() -> Result<(), aes_gcm::Error> {
    let key = GenericArray::from_slice(&[7u8; 32]);
    let cipher = Aes256Gcm::new(key);
    let nonce = Aes256Gcm::generate_nonce(&mut OsRng);
    let ciphertext = cipher.encrypt(&nonce, b"config blob".as_ref())?;
    println!("{}", ciphertext.len());
    Ok(())
}
