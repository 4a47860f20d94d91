//! DNFs as ordered term lists, with unambiguity checking.

use crate::error::{Error, Result};
use crate::table::FunTable;
use crate::var::{Assignment, Universe, VarId};
use crate::Guard;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: VarId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: VarId) -> Literal {
        Literal { var, positive: true }
    }

    pub fn neg(var: VarId) -> Literal {
        Literal {
            var,
            positive: false,
        }
    }
}

/// A consistent set of literals; the empty term is the constant true.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    lits: Vec<Literal>, // sorted by variable, one literal per variable
}

impl Term {
    pub fn new(mut lits: Vec<Literal>) -> Result<Term> {
        lits.sort();
        lits.dedup();
        for w in lits.windows(2) {
            if w[0].var == w[1].var {
                return Err(Error::InconsistentTerm(w[0].var));
            }
        }
        Ok(Term { lits })
    }

    pub fn empty() -> Term {
        Term { lits: Vec::new() }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn polarity_of(&self, v: VarId) -> Option<bool> {
        self.lits
            .iter()
            .find(|l| l.var == v)
            .map(|l| l.positive)
    }

    /// Two terms clash when some variable occurs in both with opposite
    /// polarity; clashing terms cannot be satisfied simultaneously.
    pub fn clashes_with(&self, other: &Term) -> bool {
        // both literal lists are sorted by variable
        let (mut i, mut j) = (0, 0);
        while i < self.lits.len() && j < other.lits.len() {
            let (a, b) = (self.lits[i], other.lits[j]);
            if a.var == b.var {
                if a.positive != b.positive {
                    return true;
                }
                i += 1;
                j += 1;
            } else if a.var < b.var {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    pub fn satisfied_by(&self, a: &Assignment) -> Result<bool> {
        for l in &self.lits {
            if a.get(l.var)? != l.positive {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Packed polarity masks over universe positions, used to make the pairwise
/// clash test O(words) on large lifted instances.
struct TermMasks {
    pos: Vec<u64>,
    neg: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguityWitness {
    pub term_a: usize,
    pub term_b: usize,
    pub assignment: Assignment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dnf {
    universe: Universe,
    terms: Vec<Term>,
}

impl Dnf {
    pub fn new(universe: Universe, terms: Vec<Term>) -> Result<Dnf> {
        for t in &terms {
            for l in t.literals() {
                if !universe.contains(l.var) {
                    return Err(Error::VarNotInUniverse(l.var));
                }
            }
        }
        Ok(Dnf { universe, terms })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Maximum number of literals in a term (the `k` of a k-DNF).
    pub fn width(&self) -> usize {
        self.terms.iter().map(Term::len).max().unwrap_or(0)
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        for t in &self.terms {
            if t.satisfied_by(a)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn term_masks(&self) -> Vec<TermMasks> {
        let words = self.universe.len().div_ceil(64).max(1);
        self.terms
            .iter()
            .map(|t| {
                let mut m = TermMasks {
                    pos: vec![0; words],
                    neg: vec![0; words],
                };
                for l in t.literals() {
                    let p = self.universe.position(l.var).expect("term var in universe");
                    let target = if l.positive { &mut m.pos } else { &mut m.neg };
                    target[p / 64] |= 1 << (p % 64);
                }
                m
            })
            .collect()
    }

    /// Pairwise unambiguity test: the DNF is unambiguous iff every pair of
    /// distinct terms clashes. Duplicate terms (including two empty terms)
    /// never clash and are therefore ambiguous.
    pub fn ambiguity_witness(&self) -> Option<AmbiguityWitness> {
        let masks = self.term_masks();
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                let clash = masks[i]
                    .pos
                    .iter()
                    .zip(&masks[j].neg)
                    .chain(masks[i].neg.iter().zip(&masks[j].pos))
                    .any(|(a, b)| a & b != 0);
                if !clash {
                    return Some(AmbiguityWitness {
                        term_a: i,
                        term_b: j,
                        assignment: self.merged_assignment(i, j),
                    });
                }
            }
        }
        None
    }

    /// An assignment satisfying both (non-clashing) terms: their literal
    /// union, remaining variables false.
    fn merged_assignment(&self, i: usize, j: usize) -> Assignment {
        let mut a = Assignment::all_false(self.universe.clone());
        for t in [&self.terms[i], &self.terms[j]] {
            for l in t.literals() {
                a.set(l.var, l.positive).expect("term var in universe");
            }
        }
        a
    }

    pub fn is_unambiguous(&self) -> bool {
        self.ambiguity_witness().is_none()
    }

    /// Exponential cross-validation mode: enumerate every assignment and
    /// count satisfied terms directly.
    pub fn is_unambiguous_brute_force(&self, guard: Guard) -> Result<bool> {
        guard.check(self.universe.len(), "brute-force unambiguity")?;
        for rank in 0..1usize << self.universe.len() {
            let a = Assignment::from_rank(self.universe.clone(), rank);
            let mut hits = 0;
            for t in &self.terms {
                if t.satisfied_by(&a)? {
                    hits += 1;
                    if hits > 1 {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn to_table(&self, guard: Guard) -> Result<FunTable> {
        guard.check(self.universe.len(), "DNF tabulation")?;
        let mut t = FunTable::constant(self.universe.clone(), false);
        for rank in 0..1usize << self.universe.len() {
            let a = Assignment::from_rank(self.universe.clone(), rank);
            if self.eval(&a)? {
                t.set_rank(rank, true);
            }
        }
        Ok(t)
    }

    /// DIMACS-flavored text format: `p udnf <nvars> <nterms>` then one term
    /// per line as signed integers terminated by 0; `c` lines are comments.
    pub fn parse(text: &str) -> Result<Dnf> {
        let mut header: Option<(u32, usize)> = None;
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "duplicate header".into(),
                    });
                }
                let mut it = line.split_whitespace();
                it.next();
                if it.next() != Some("udnf") {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected `p udnf <nvars> <nterms>`".into(),
                    });
                }
                let nvars: u32 = parse_tok(it.next(), line_no, "variable count")?;
                let nterms: usize = parse_tok(it.next(), line_no, "term count")?;
                header = Some((nvars, nterms));
                continue;
            }
            let (nvars, _) = header.ok_or(Error::Parse {
                line: line_no,
                msg: "term before header".into(),
            })?;
            let mut lits = Vec::new();
            let mut terminated = false;
            for tok in line.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad literal `{tok}`"),
                })?;
                if v == 0 {
                    terminated = true;
                    break;
                }
                let var = VarId(v.unsigned_abs() as u32);
                if var.0 == 0 || var.0 > nvars {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("variable {} out of range 1..={}", var.0, nvars),
                    });
                }
                lits.push(Literal {
                    var,
                    positive: v > 0,
                });
            }
            if !terminated {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "term line must be terminated by 0".into(),
                });
            }
            terms.push(Term::new(lits).map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?);
        }
        let (nvars, nterms) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing `p udnf` header".into(),
        })?;
        if terms.len() != nterms {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {} terms, found {}", nterms, terms.len()),
            });
        }
        Dnf::new(Universe::range(nvars), terms)
    }

    /// Inverse of [`Dnf::parse`]; only defined for `1..=n` universes.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "p udnf {} {}",
            self.universe.len(),
            self.terms.len()
        );
        for t in &self.terms {
            for l in t.literals() {
                let signed = l.var.0 as i64 * if l.positive { 1 } else { -1 };
                let _ = write!(s, "{signed} ");
            }
            let _ = writeln!(s, "0");
        }
        s
    }
}

fn parse_tok<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T> {
    tok.and_then(|t| t.parse().ok()).ok_or(Error::Parse {
        line,
        msg: format!("missing or malformed {what}"),
    })
}

/// Renders an assignment as a sorted variable-to-bit map, for witnesses in
/// reports.
pub fn assignment_map(a: &Assignment) -> BTreeMap<u32, u8> {
    a.pairs().map(|(v, b)| (v.0, b as u8)).collect()
}

/// The Figure-style five-variable fixture used across the test suites:
/// (a ∧ b ∧ ¬c) ∨ (a ∧ b ∧ c ∧ e) ∨ (a ∧ b ∧ c ∧ d ∧ ¬e)
/// over a=1, b=2, c=3, d=4, e=5.
pub fn golden_dnf() -> Dnf {
    let (a, b, c, d, e) = (VarId(1), VarId(2), VarId(3), VarId(4), VarId(5));
    Dnf::new(
        Universe::range(5),
        vec![
            Term::new(vec![Literal::pos(a), Literal::pos(b), Literal::neg(c)]).unwrap(),
            Term::new(vec![
                Literal::pos(a),
                Literal::pos(b),
                Literal::pos(c),
                Literal::pos(e),
            ])
            .unwrap(),
            Term::new(vec![
                Literal::pos(a),
                Literal::pos(b),
                Literal::pos(c),
                Literal::pos(d),
                Literal::neg(e),
            ])
            .unwrap(),
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clashing_pair_is_unambiguous() {
        // (x1∧x2) ∨ (¬x1∧x2): terms clash on x1
        let u = Universe::range(2);
        let d = Dnf::new(
            u,
            vec![
                Term::new(vec![Literal::pos(VarId(1)), Literal::pos(VarId(2))]).unwrap(),
                Term::new(vec![Literal::neg(VarId(1)), Literal::pos(VarId(2))]).unwrap(),
            ],
        )
        .unwrap();
        assert!(d.is_unambiguous());
    }

    #[test]
    fn overlapping_pair_is_ambiguous_with_witness() {
        // x1 ∨ x2: (1,1) satisfies both
        let u = Universe::range(2);
        let d = Dnf::new(
            u,
            vec![
                Term::new(vec![Literal::pos(VarId(1))]).unwrap(),
                Term::new(vec![Literal::pos(VarId(2))]).unwrap(),
            ],
        )
        .unwrap();
        let w = d.ambiguity_witness().unwrap();
        assert_eq!((w.term_a, w.term_b), (0, 1));
        assert!(d.terms()[0].satisfied_by(&w.assignment).unwrap());
        assert!(d.terms()[1].satisfied_by(&w.assignment).unwrap());
    }

    #[test]
    fn golden_dnf_is_unambiguous() {
        // every pair clashes on c or e
        assert!(golden_dnf().is_unambiguous());
    }

    #[test]
    fn duplicate_empty_terms_are_ambiguous() {
        let d = Dnf::new(Universe::range(1), vec![Term::empty(), Term::empty()]).unwrap();
        assert!(!d.is_unambiguous());
        assert!(!d.is_unambiguous_brute_force(Guard::TABLE).unwrap());
    }

    #[test]
    fn empty_term_list_is_constant_false() {
        let d = Dnf::new(Universe::range(3), vec![]).unwrap();
        assert!(d.to_table(Guard::TABLE).unwrap().is_constant_false());
    }

    #[test]
    fn single_empty_term_is_constant_true() {
        let d = Dnf::new(Universe::range(3), vec![Term::empty()]).unwrap();
        assert!(d.to_table(Guard::TABLE).unwrap().is_constant_true());
    }

    #[test]
    fn golden_dnf_table_via_enumeration() {
        // Independent oracle: evaluate the caption formula directly on all
        // 32 assignments and compare with to_table.
        let d = golden_dnf();
        let t = d.to_table(Guard::TABLE).unwrap();
        let oracle = FunTable::tabulate(Universe::range(5), |asg| {
            let g = |i: u32| asg.get(VarId(i)).unwrap();
            let (a, b, c, dd, e) = (g(1), g(2), g(3), g(4), g(5));
            (a && b && !c) || (a && b && c && e) || (a && b && c && dd && !e)
        });
        assert_eq!(t, oracle);
        // 4 + 2 + 1 models: term one leaves d,e free, term two leaves d free
        assert_eq!(t.sat_count(), 7);
        assert_eq!(t.negate().sat_count(), 25);
    }

    #[test]
    fn guard_violation_is_reported() {
        let d = Dnf::new(Universe::range(25), vec![Term::empty()]).unwrap();
        assert!(matches!(
            d.to_table(Guard::TABLE),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn parse_print_round_trip() {
        let text = "c comment\np udnf 3 2\n1 -2 0\n2 3 0\n";
        let d = Dnf::parse(text).unwrap();
        assert_eq!(d.term_count(), 2);
        assert_eq!(Dnf::parse(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn parse_rejects_malformed_header() {
        assert!(matches!(
            Dnf::parse("p dnf 2 1\n1 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn parse_rejects_out_of_range_variable() {
        assert!(Dnf::parse("p udnf 2 1\n3 0\n").is_err());
    }

    #[test]
    fn inconsistent_term_rejected() {
        assert!(Term::new(vec![Literal::pos(VarId(1)), Literal::neg(VarId(1))]).is_err());
    }
}
