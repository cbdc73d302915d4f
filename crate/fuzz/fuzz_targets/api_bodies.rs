#![no_main]

use cast_session::api::{CreateSession, Guess, Rating};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(v) = serde_json::from_slice::<CreateSession>(data) {
        let back: CreateSession = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, back);
    }
    if let Ok(v) = serde_json::from_slice::<Guess>(data) {
        let back: Guess = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, back);
    }
    if let Ok(v) = serde_json::from_slice::<Rating>(data) {
        let back: Rating = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, back);
    }
});
