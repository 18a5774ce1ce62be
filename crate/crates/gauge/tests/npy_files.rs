use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sim2real_gauge::npy::{encode_npy, parse_npy, read_npy, write_npy, NpyError};
use sim2real_gauge_core::Matrix;

fn any_finite(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v = f64::from_bits(rng.random());
        if v.is_finite() {
            return v;
        }
    }
}

proptest! {
    #[test]
    fn round_trip_is_bit_exact(seed in any::<u64>(), rows in 1usize..40, cols in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..rows * cols).map(|_| any_finite(&mut rng)).collect();
        let m = Matrix::new(rows, cols, data).unwrap();
        let back = parse_npy(&encode_npy(&m).unwrap()).unwrap();
        prop_assert_eq!(back.shape(), m.shape());
        for (a, b) in back.as_slice().iter().zip(m.as_slice()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn preamble_is_64_byte_aligned(rows in 1usize..3000, cols in 1usize..300) {
        let bytes = encode_npy(&Matrix::zeros(rows, cols)).unwrap();
        let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
        prop_assert_eq!((10 + header_len) % 64, 0);
        prop_assert_eq!(bytes[9 + header_len], b'\n');
        prop_assert_eq!(bytes.len(), 10 + header_len + 8 * rows * cols);
    }

    #[test]
    fn random_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_npy(&bytes);
        let mut prefixed = b"\x93NUMPY\x01\x00".to_vec();
        prefixed.extend_from_slice(&bytes);
        let _ = parse_npy(&prefixed);
    }
}

#[test]
fn file_round_trip_random_50x16() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.npy");
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let m = Matrix::new(50, 16, (0..800).map(|_| rng.random_range(-1e3..1e3)).collect()).unwrap();
    write_npy(&m, &path).unwrap();
    let back = read_npy(&path).unwrap();
    assert_eq!(back, m);
    let bytes = std::fs::read(&path).unwrap();
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    assert_eq!((10 + header_len) % 64, 0);
    assert_eq!(bytes.len(), 10 + header_len + 800 * 8);
}

#[test]
fn read_errors_carry_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.npy");
    std::fs::write(&path, b"not an npy file").unwrap();
    let err = read_npy(&path).unwrap_err();
    assert!(matches!(&err, NpyError::InFile { source, .. } if matches!(**source, NpyError::BadMagic)));
    assert!(err.to_string().contains("bad.npy"));
    let missing = dir.path().join("missing.npy");
    let err = write_npy(&Matrix::zeros(1, 1), dir.path().join("no/such/dir.npy")).unwrap_err();
    assert!(matches!(err, NpyError::Io { .. }));
    assert!(matches!(read_npy(&missing), Err(NpyError::Io { .. })));
}
