//! Backward rewriting of output cones into polynomials over the primary
//! inputs, run as a pool of per-output tasks, and comparison against a
//! golden specification.

mod iomap;

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, warn};
use thiserror::Error;

use crate::netlist::{Cone, Netlist, NetlistError};
use crate::poly::{gate_polynomial, Expression, PolyError, Polynomial, VarId};
use crate::specgen::{build_spec_over, IrreduciblePoly};

pub use iomap::{IoMap, MappingError};

/// Per-task term ceiling used when none is given.
pub const DEFAULT_TERM_CEILING: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("output `{output}`: signal `{signal}` is neither driven nor a primary input")]
    UndrivenSignal { output: String, signal: String },
    #[error("output `{output}`: expression reached {terms} terms, above the ceiling of {ceiling}")]
    TermCeilingExceeded {
        output: String,
        terms: usize,
        ceiling: usize,
    },
    #[error("output `{output}`: {source}")]
    Poly { output: String, source: PolyError },
    #[error("output order is not a permutation of the extracted outputs: {0}")]
    InvalidOutputOrder(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Maximum number of concurrently running extractions; at least 1.
    pub threads: usize,
    pub term_ceiling: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            threads: default_threads(),
            term_ceiling: DEFAULT_TERM_CEILING,
        }
    }
}

impl ExtractOptions {
    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads,
            ..Self::default()
        }
    }
}

/// Available hardware threads, capped at 16.
pub fn default_threads() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get()).min(16)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeStats {
    pub gate_count: usize,
    pub peak_terms: usize,
    pub substitutions: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct OutputExtraction {
    pub output: VarId,
    pub name: String,
    pub polynomial: Polynomial,
    pub stats: ConeStats,
}

#[derive(Clone, Debug)]
pub struct ExtractionResult {
    /// One entry per requested output, in request order.
    pub per_output: Vec<OutputExtraction>,
    pub threads: usize,
    pub wall_time: Duration,
}

impl ExtractionResult {
    /// Wraps externally obtained polynomials, with empty stats.
    pub fn from_polynomials(outputs: Vec<(VarId, String, Polynomial)>) -> Self {
        let per_output = outputs
            .into_iter()
            .map(|(output, name, polynomial)| OutputExtraction {
                output,
                name,
                polynomial,
                stats: ConeStats {
                    gate_count: 0,
                    peak_terms: 0,
                    substitutions: 0,
                    elapsed: Duration::ZERO,
                },
            })
            .collect();
        Self {
            per_output,
            threads: 1,
            wall_time: Duration::ZERO,
        }
    }

    pub fn get(&self, output: VarId) -> Option<&Polynomial> {
        self.per_output
            .iter()
            .find(|o| o.output == output)
            .map(|o| &o.polynomial)
    }

    pub fn polynomials(&self) -> Vec<&Polynomial> {
        self.per_output.iter().map(|o| &o.polynomial).collect()
    }

    pub fn peak_terms(&self) -> usize {
        self.per_output
            .iter()
            .map(|o| o.stats.peak_terms)
            .max()
            .unwrap_or(0)
    }

    /// Same outputs with the same polynomials, ignoring stats.
    pub fn same_polynomials(&self, other: &ExtractionResult) -> bool {
        self.per_output.len() == other.per_output.len()
            && self
                .per_output
                .iter()
                .zip(&other.per_output)
                .all(|(x, y)| x.output == y.output && x.polynomial == y.polynomial)
    }
}

/// Substitutes the gates of `gates` (topologically ordered) into `seed`,
/// last gate first; gates whose output is absent are skipped. Remaining
/// variables are not checked.
pub fn rewrite_gates(
    n: &Netlist,
    gates: &[usize],
    seed: Polynomial,
    term_ceiling: usize,
    label: &str,
) -> Result<(Polynomial, ConeStats), ExtractError> {
    let start = Instant::now();
    let mut expr = Expression::from_polynomial(seed);
    let mut peak = expr.len();
    let mut substitutions = 0;
    for &gi in gates.iter().rev() {
        let g = n.gate(gi);
        if !expr.contains_var(g.output) {
            continue;
        }
        let ins: Vec<Polynomial> = g.inputs.iter().map(|&u| Polynomial::var(u)).collect();
        let tag = |source| ExtractError::Poly {
            output: label.to_owned(),
            source,
        };
        let model = gate_polynomial(g.kind, &ins).map_err(tag)?;
        expr.substitute(g.output, &model).map_err(tag)?;
        substitutions += 1;
        peak = peak.max(expr.len());
        if expr.len() > term_ceiling {
            return Err(ExtractError::TermCeilingExceeded {
                output: label.to_owned(),
                terms: expr.len(),
                ceiling: term_ceiling,
            });
        }
    }
    let stats = ConeStats {
        gate_count: gates.len(),
        peak_terms: peak,
        substitutions,
        elapsed: start.elapsed(),
    };
    Ok((expr.into_polynomial(), stats))
}

/// Rewrites `seed` through `cone`; the result ranges over primary inputs
/// only.
pub fn rewrite_cone(
    n: &Netlist,
    cone: &Cone,
    seed: Polynomial,
    term_ceiling: usize,
) -> Result<(Polynomial, ConeStats), ExtractError> {
    let label = n.name(cone.output);
    let (poly, stats) = rewrite_gates(n, &cone.gates, seed, term_ceiling, label)?;
    if let Some(v) = poly.vars().into_iter().find(|&v| !n.is_primary_input(v)) {
        return Err(ExtractError::UndrivenSignal {
            output: label.to_owned(),
            signal: n.vars().try_name(v).unwrap_or("?").to_owned(),
        });
    }
    Ok((poly, stats))
}

/// Extracts every primary output in declaration order.
pub fn extract_all(n: &Netlist, opts: &ExtractOptions) -> Result<ExtractionResult, ExtractError> {
    extract_outputs(n, n.primary_outputs(), opts)
}

/// Extracts `outputs` with at most `opts.threads` workers. Tasks are
/// claimed in the given order as workers become free; results do not
/// depend on the thread count.
pub fn extract_outputs(
    n: &Netlist,
    outputs: &[VarId],
    opts: &ExtractOptions,
) -> Result<ExtractionResult, ExtractError> {
    let start = Instant::now();
    let unreachable = n.unreachable_gates().len();
    if unreachable > 0 {
        warn!("{unreachable} gate(s) feed no primary output and are ignored");
    }
    let cones = outputs
        .iter()
        .map(|&o| n.extract_cone(o))
        .collect::<Result<Vec<_>, _>>()?;
    let tasks = cones.len();
    let threads = opts.threads.max(1).min(tasks.max(1));
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let mut slots: Vec<Option<Result<(Polynomial, ConeStats), ExtractError>>> =
        (0..tasks).map(|_| None).collect();

    thread::scope(|s| {
        let workers: Vec<_> = (0..threads)
            .map(|_| {
                s.spawn(|| {
                    let mut done = Vec::new();
                    while !abort.load(Ordering::Relaxed) {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= tasks {
                            break;
                        }
                        let cone = &cones[i];
                        let seed = Polynomial::var(cone.output);
                        let r = rewrite_cone(n, cone, seed, opts.term_ceiling);
                        if r.is_err() {
                            abort.store(true, Ordering::Relaxed);
                        }
                        done.push((i, r));
                    }
                    done
                })
            })
            .collect();
        for w in workers {
            for (i, r) in w.join().expect("extraction worker panicked") {
                slots[i] = Some(r);
            }
        }
    });

    let mut per_output = Vec::with_capacity(tasks);
    for (cone, slot) in cones.iter().zip(slots) {
        match slot {
            Some(Ok((polynomial, stats))) => {
                let name = n.name(cone.output).to_owned();
                debug!(
                    "{name}: {} terms, {} gates, peak {}",
                    polynomial.len(),
                    stats.gate_count,
                    stats.peak_terms
                );
                per_output.push(OutputExtraction {
                    output: cone.output,
                    name,
                    polynomial,
                    stats,
                });
            }
            Some(Err(e)) => return Err(e),
            None => {}
        }
    }
    if per_output.len() < tasks {
        unreachable!("aborted run without a recorded error");
    }
    Ok(ExtractionResult {
        per_output,
        threads,
        wall_time: start.elapsed(),
    })
}

/// Coefficient polynomials `[F_0, .., F_{m-1}]` of `sum_i F_i x^i`, taking
/// `order[i]` as the wire of `x^i`.
pub fn assemble_signature(r: &ExtractionResult, order: &[VarId]) -> Result<Vec<Polynomial>, ExtractError> {
    if order.len() != r.per_output.len() {
        return Err(ExtractError::InvalidOutputOrder(format!(
            "{} outputs given, {} extracted",
            order.len(),
            r.per_output.len()
        )));
    }
    let mut used = vec![false; r.per_output.len()];
    order
        .iter()
        .map(|&v| {
            let k = r
                .per_output
                .iter()
                .position(|o| o.output == v)
                .ok_or_else(|| ExtractError::InvalidOutputOrder(format!("{v} was not extracted")))?;
            if std::mem::replace(&mut used[k], true) {
                return Err(ExtractError::InvalidOutputOrder(format!(
                    "`{}` appears twice",
                    r.per_output[k].name
                )));
            }
            Ok(r.per_output[k].polynomial.clone())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub output: VarId,
    pub name: String,
    pub position: usize,
    /// Extracted plus expected, mod 2.
    pub polynomial: Polynomial,
    pub text: String,
}

/// `equal` holds iff every residual is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub equal: bool,
    /// One entry per output position.
    pub residuals: Vec<Residual>,
}

impl Verdict {
    pub fn mismatches(&self) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(|r| !r.polynomial.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct Verification {
    pub extraction: ExtractionResult,
    pub verdict: Verdict,
}

/// Extracts `n` and compares it with the multiplication spec for `p` under
/// the bit order `io`.
pub fn verify(
    n: &Netlist,
    p: &IrreduciblePoly,
    io: &IoMap,
    opts: &ExtractOptions,
) -> Result<Verification, ExtractError> {
    check_degree(p, io)?;
    let extraction = extract_outputs(n, io.z(), opts)?;
    let verdict = verify_extracted(n, &extraction, p, io)?;
    Ok(Verification { extraction, verdict })
}

fn check_degree(p: &IrreduciblePoly, io: &IoMap) -> Result<(), MappingError> {
    if io.m() != p.degree() {
        return Err(MappingError::DegreeMismatch {
            expected: p.degree(),
            got: io.m(),
        });
    }
    Ok(())
}

/// Compares already extracted polynomials with the spec.
pub fn verify_extracted(
    n: &Netlist,
    r: &ExtractionResult,
    p: &IrreduciblePoly,
    io: &IoMap,
) -> Result<Verdict, ExtractError> {
    check_degree(p, io)?;
    let spec = build_spec_over(p, io.a(), io.b());
    let got = assemble_signature(r, io.z())?;
    let residuals: Vec<Residual> = got
        .iter()
        .zip(&spec.outputs)
        .enumerate()
        .map(|(i, (f, s))| {
            let polynomial = f + s;
            Residual {
                output: io.z()[i],
                name: n.name(io.z()[i]).to_owned(),
                position: i,
                text: polynomial.to_text(n.vars()),
                polynomial,
            }
        })
        .collect();
    let equal = residuals.iter().all(|r| r.polynomial.is_zero());
    Ok(Verdict { equal, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse_equations, tests::FIG3};
    use crate::specgen::generate_mastrovito;

    fn texts(n: &Netlist, r: &ExtractionResult) -> Vec<String> {
        r.per_output
            .iter()
            .map(|o| o.polynomial.to_text(n.vars()))
            .collect()
    }

    #[test]
    fn fig3_extraction() {
        let n = parse_equations(FIG3).unwrap();
        let r = extract_all(&n, &ExtractOptions::with_threads(2)).unwrap();
        assert_eq!(texts(&n, &r), ["a0*b0+a1*b1", "a0*b1+a1*b0+a1*b1"]);
        let z0 = n.var("z0").unwrap();
        let z1 = n.var("z1").unwrap();
        let sig = assemble_signature(&r, &[z1, z0]).unwrap();
        assert_eq!(sig[0].to_text(n.vars()), "a0*b1+a1*b0+a1*b1");
        assert!(matches!(
            assemble_signature(&r, &[z0, z0]),
            Err(ExtractError::InvalidOutputOrder(_))
        ));
        assert!(assemble_signature(&r, &[z0]).is_err());
    }

    #[test]
    fn fig5_partial_trace() {
        // z0 after G7 and then G2: i1 + a1b1 + 1.
        let n = parse_equations(FIG3).unwrap();
        let cone = n.extract_cone(n.var("z0").unwrap()).unwrap();
        let i2 = n.driver(n.var("i2").unwrap()).unwrap();
        let z0 = n.driver(n.var("z0").unwrap()).unwrap();
        let (f, _) = rewrite_gates(&n, &[i2, z0], Polynomial::var(cone.output), 100, "z0").unwrap();
        assert_eq!(f.to_text(n.vars()), "1+i1+a1*b1");
    }

    #[test]
    fn buffer_and_idempotent_and() {
        let n = parse_equations("inputs a\noutputs z y\nz = BUF(a)\ny = AND(a, a)\n").unwrap();
        let r = extract_all(&n, &ExtractOptions::with_threads(1)).unwrap();
        assert_eq!(texts(&n, &r), ["a", "a"]);
    }

    #[test]
    fn term_ceiling_aborts() {
        let g = generate_mastrovito(&"8,4,3,1,0".parse().unwrap());
        let opts = ExtractOptions {
            threads: 3,
            term_ceiling: 4,
        };
        match extract_all(&g.netlist, &opts) {
            Err(ExtractError::TermCeilingExceeded { ceiling: 4, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undriven_seed_variable() {
        let n = parse_equations(FIG3).unwrap();
        let cone = n.extract_cone(n.var("z0").unwrap()).unwrap();
        let stray = n.var("i6").unwrap();
        let seed = &Polynomial::var(cone.output) + &Polynomial::var(stray);
        match rewrite_cone(&n, &cone, seed, 100) {
            Err(ExtractError::UndrivenSignal { signal, .. }) => assert_eq!(signal, "i6"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn verify_generated_and_swapped() {
        let p: IrreduciblePoly = "4,1,0".parse().unwrap();
        let g = generate_mastrovito(&p);
        let io = IoMap::from_truth(&g.netlist, &g.truth).unwrap();
        let opts = ExtractOptions::with_threads(2);
        let v = verify(&g.netlist, &p, &io, &opts).unwrap();
        assert!(v.verdict.equal);
        assert!(v.verdict.residuals.iter().all(|r| r.text == "0"));
        assert!(
            verify(&g.netlist, &p, &io.swapped(), &opts)
                .unwrap()
                .verdict
                .equal
        );
        let other: IrreduciblePoly = "4,3,0".parse().unwrap();
        assert!(!verify(&g.netlist, &other, &io, &opts).unwrap().verdict.equal);
    }

    #[test]
    fn mapping_errors() {
        let g = generate_mastrovito(&"2,1,0".parse().unwrap());
        let n = &g.netlist;
        assert!(IoMap::by_prefix(n, "a", "b", "z").is_ok());
        assert!(matches!(
            IoMap::from_names(n, &["a0", "a1"], &["b0", "a1"], &["z0", "z1"]),
            Err(MappingError::Duplicate(_))
        ));
        assert!(matches!(
            IoMap::from_names(n, &["a0", "p0_0"], &["b0", "b1"], &["z0", "z1"]),
            Err(MappingError::NotAPrimaryInput(_))
        ));
        assert!(matches!(
            IoMap::from_names(n, &["a0"], &["b0"], &["z0"]),
            Err(MappingError::Incomplete { .. })
        ));
        assert!(matches!(
            IoMap::by_prefix(n, "a", "b", "q"),
            Err(MappingError::NoMatchingOutputs(_))
        ));
        let io = IoMap::by_prefix(n, "a", "b", "z").unwrap();
        let p4: IrreduciblePoly = "4,1,0".parse().unwrap();
        assert!(matches!(
            verify(n, &p4, &io, &ExtractOptions::default()),
            Err(ExtractError::Mapping(MappingError::DegreeMismatch { .. }))
        ));
    }
}
