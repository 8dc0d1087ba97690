//! Constructed parameter subspaces and model settings used by the
//! reproduction suite and the tests.

use qaccess_core::{Mat3, ParamSubspace, SymMat3};

pub struct Pattern {
    pub name: &'static str,
    pub space: ParamSubspace,
}

fn free(name: &'static str, entries: &[(usize, usize)]) -> Pattern {
    Pattern { name, space: ParamSubspace::free_entries(entries).expect("distinct entries") }
}

fn ray(name: &'static str, six: [f64; 6]) -> Pattern {
    Pattern { name, space: ParamSubspace::new(vec![SymMat3::from_six(six)]).expect("nonzero ray") }
}

/// Free entries of the spin-field Kossakowski matrix (`c22 = 0`).
pub const SPIN_FIELD_ENTRIES: [(usize, usize); 5] = [(0, 0), (2, 2), (0, 1), (0, 2), (1, 2)];
/// Switching example with `c33 = 0`.
pub const SWITCHING_ENTRIES: [(usize, usize); 5] = [(0, 0), (1, 1), (0, 1), (0, 2), (1, 2)];
/// Switching example with additionally `c12 = c13 = 0`.
pub const SWITCHING_REDUCED_ENTRIES: [(usize, usize); 3] = [(0, 0), (1, 1), (1, 2)];

pub fn rotation(a: f64, b: f64, c: f64) -> Mat3 {
    let rz = |t: f64| Mat3::new(t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0);
    let rx = |t: f64| Mat3::new(1.0, 0.0, 0.0, 0.0, t.cos(), -t.sin(), 0.0, t.sin(), t.cos());
    rz(a) * rx(b) * rz(c)
}

/// At least ten subspaces covering every case label.
pub fn patterns() -> Vec<Pattern> {
    let spin = free("spin field", &SPIN_FIELD_ENTRIES);
    let rotated = Pattern { name: "spin field, rotated", space: spin.space.conjugated(&rotation(0.4, 1.1, -0.7)) };
    vec![
        ray("identity ray", [1.0, 1.0, 1.0, 0.0, 0.0, 0.0]),
        ray("indefinite ray", [1.0, -1.0, 0.0, 0.0, 0.0, 0.0]),
        ray("indefinite ray, odd sign", [1.0, -1.0, 1.0, 0.0, 0.0, 0.0]),
        ray("positive-only ray", [1.0, 1.0, -0.5, 0.0, 0.0, 0.0]),
        ray("off-diagonal ray", [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
        spin,
        rotated,
        free("switching", &SWITCHING_ENTRIES),
        free("switching, reduced", &SWITCHING_REDUCED_ENTRIES),
        free("upper block", &[(0, 0), (1, 1), (0, 1)]),
        free("rate and coupling", &[(0, 0), (1, 2)]),
        free("single rate", &[(0, 0)]),
        free("diagonal", &[(0, 0), (1, 1), (2, 2)]),
        free("full", &[(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]),
    ]
}
