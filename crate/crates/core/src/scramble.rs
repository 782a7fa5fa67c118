//! Seeded obfuscation of a netlist: every wire gets a meaningless name and
//! the gate, input and output lists are shuffled. The function is
//! unchanged; the ground truth is renamed alongside.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::netlist::{Netlist, NetlistError};
use crate::specgen::GroundTruth;

/// A scrambled netlist with its renamed ground truth.
#[derive(Clone, Debug)]
pub struct Scrambled {
    pub netlist: Netlist,
    pub truth: GroundTruth,
    /// Original name to new name.
    pub renaming: FxHashMap<String, String>,
}

/// Same seed, same result.
pub fn scramble(n: &Netlist, truth: &GroundTruth, seed: u64) -> Result<Scrambled, NetlistError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = n.vars().len();
    let mut ids: Vec<usize> = (0..count).collect();
    ids.shuffle(&mut rng);
    let renaming: FxHashMap<String, String> = n
        .vars()
        .iter()
        .map(|(v, name)| (name.to_owned(), format!("n{}", ids[v.index()])))
        .collect();
    let rename = |s: &str| renaming.get(s).cloned().unwrap_or_else(|| s.to_owned());

    let mut order = |len: usize| {
        let mut v: Vec<usize> = (0..len).collect();
        v.shuffle(&mut rng);
        v
    };
    let gates = order(n.gates().len());
    let inputs = order(n.primary_inputs().len());
    let outputs = order(n.primary_outputs().len());
    let netlist = n.relabeled(rename, &gates, &inputs, &outputs)?;
    let truth = truth.renamed(rename);
    Ok(Scrambled {
        netlist,
        truth,
        renaming,
    })
}
