mod common;

use common::oracles::{evjen_cesium_chloride, evjen_rock_salt};
use hyqgnn::featurize::{ewald_energies, EwaldConfig, COULOMB_CONSTANT};
use hyqgnn::structure::reference_structure;

#[test]
fn evjen_oracle_converges() {
    let nacl = evjen_rock_salt(20);
    let cscl = evjen_cesium_chloride(20);
    println!("evjen NaCl {nacl:.7} CsCl {cscl:.7}");
    assert!((nacl - evjen_rock_salt(21)).abs() < 1e-5);
    assert!((cscl - evjen_cesium_chloride(21)).abs() < 1e-4);
}

#[test]
fn madelung_constants_match_direct_summation() {
    let cfg = EwaldConfig::default();
    let nacl = reference_structure("NaCl").unwrap();
    let e = ewald_energies(&nacl, &cfg).unwrap();
    let r0 = nacl.lattice.rows()[0][0] / 2.0;
    let madelung = e.total / 4.0 * r0 / COULOMB_CONSTANT;
    println!("ewald NaCl {madelung:.7}");
    assert!((madelung - evjen_rock_salt(20)).abs() < 1e-4);
    assert!((madelung + 1.74756).abs() < 1e-4);

    let cscl = reference_structure("CsCl").unwrap();
    let e = ewald_energies(&cscl, &cfg).unwrap();
    let r0 = cscl.lattice.rows()[0][0] * 3f64.sqrt() / 2.0;
    let madelung = e.total * r0 / COULOMB_CONSTANT;
    println!("ewald CsCl {madelung:.7}");
    assert!((madelung - evjen_cesium_chloride(20)).abs() < 1e-4);
    assert!((madelung + 1.76267).abs() < 1e-4);
}
