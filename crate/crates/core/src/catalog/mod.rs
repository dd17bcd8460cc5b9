//! The built-in catalog: torus models, monodromies, involutions, singular
//! component metadata and expected values for regression checks.

pub mod maps;

use crate::scalar::{rat, Rat};
use crate::torus::{mapping_torus_fixed_components, FixedComponent, SymmetryKind};
use num_traits::Zero;

/// Components of the commuting fixed locus on the mapping torus of F_{k,a},
/// ordered by the catalog convention (half-lattice basepoints listed below).
pub fn iota_components(k: u32, a: u32) -> Vec<FixedComponent> {
    let torus = maps::torus_model(k);
    let comps = mapping_torus_fixed_components(
        SymmetryKind::Commuting,
        &maps::xi(),
        &maps::monodromy(k, a),
        &torus,
    )
    .expect("commuting fixed locus");
    let h = rat(1, 2);
    let z = Rat::zero;
    // canonical basepoints (x1, y1, x2, y2) with (x3, y3) = 0 per component
    let reps: Vec<[Rat; 4]> = match k {
        1 => vec![
            [z(), z(), z(), z()],
            [z(), z(), h.clone(), z()],
            [h.clone(), z(), z(), z()],
            [h.clone(), z(), h.clone(), h.clone()],
        ],
        2 => vec![
            [z(), z(), z(), z()],
            [z(), z(), h.clone(), h.clone()],
            [z(), z(), h.clone(), z()],
            [h.clone(), h.clone(), z(), z()],
            [h.clone(), h.clone(), h.clone(), z()],
            [h.clone(), z(), z(), z()],
            [h.clone(), z(), z(), h.clone()],
            [h.clone(), h.clone(), z(), h.clone()],
            [h.clone(), z(), h.clone(), z()],
            [h.clone(), z(), h.clone(), h.clone()],
        ],
        _ => panic!("no component ordering for torus model {}", k),
    };
    let mut ordered = vec![];
    for (i, rep) in reps.iter().enumerate() {
        let point = vec![
            rep[0].clone(),
            rep[1].clone(),
            rep[2].clone(),
            rep[3].clone(),
            Rat::zero(),
            Rat::zero(),
        ];
        let found = comps
            .iter()
            .find(|c| c.pieces.iter().any(|p| p.contains(&point)))
            .unwrap_or_else(|| panic!("no component contains canonical basepoint {}", i));
        let mut c = found.clone();
        c.id = format!("L{}", i + 1);
        ordered.push(c);
    }
    assert_eq!(ordered.len(), comps.len(), "component ordering incomplete");
    ordered
}
pub mod builders;
pub mod linking;
