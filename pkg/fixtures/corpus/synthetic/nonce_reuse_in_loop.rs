use chacha20poly1305::{
    aead::{Aead, AeadCore, KeyInit, OsRng},
    ChaCha20Poly1305,
};

fn encrypt_batch(
    cipher: &ChaCha20Poly1305,
    records: &[Vec<u8>],
) -> Result<Vec<Vec<u8>>, chacha20poly1305::Error> {
    let nonce = ChaCha20Poly1305::generate_nonce(&mut OsRng);
    let mut sealed = Vec::with_capacity(records.len());
    for record in records {
        let ct = cipher.encrypt(&nonce, record.as_slice())?;
        sealed.push(ct);
    }
    Ok(sealed)
}

fn main() -> Result<(), chacha20poly1305::Error> {
    let key = ChaCha20Poly1305::generate_key(&mut OsRng);
    let cipher = ChaCha20Poly1305::new(&key);
    let records = vec![b"alpha".to_vec(), b"beta".to_vec()];
    let sealed = encrypt_batch(&cipher, &records)?;
    println!("{}", sealed.len());
    Ok(())
}
