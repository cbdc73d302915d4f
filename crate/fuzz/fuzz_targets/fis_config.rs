#![no_main]

use cast_core::{FisConfig, IwdModel};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = FisConfig::from_json(text) else { return };
    let again = FisConfig::from_json(&cfg.to_json()).expect("serialized config parses");
    assert_eq!(cfg, again);
    let model = IwdModel::new(cfg);
    for (g, t) in [(0.0, 0.0), (3.0, 20.0), (1e9, -1e9)] {
        let ue = model.compute_ue(g, t);
        assert!(ue.value.is_finite());
    }
    let iwd = model.compute_iwd(0.5, 0.5, 1.0);
    assert!(iwd.value.is_finite());
});
