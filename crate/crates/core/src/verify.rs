//! Cross-checks of the closed-form regrouping against the state-vector oracle.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bell::{decomposition_table, BellLabel, Decomposition, PairProduct, Pairing, TableEntry, Term};
use crate::dyadic::Dyadic;
use crate::oracle::{build_pair_product, outcome_probabilities, project, BellProductBasis};

use BellLabel::{PhiMinus, PhiPlus, PsiMinus, PsiPlus};
use Pairing::{Crossed, Seq};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for CaseResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub cases: Vec<CaseResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.cases.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

/// The 32 regroupings checked by default: every label pair, in both directions.
pub fn default_table() -> Vec<TableEntry> {
    let mut t = decomposition_table(Seq, Crossed);
    t.extend(decomposition_table(Crossed, Seq));
    t
}

fn case_name(e: &TableEntry) -> String {
    format!("{},{} {}->{}", e.first.ascii(), e.second.ascii(), e.from.ascii(), e.to.ascii())
}

/// Checks one table entry against a projection of the oracle state.
pub fn check_entry(e: &TableEntry) -> CaseResult {
    let state = build_pair_product(e.first, e.second, e.from);
    let oracle = project(&state, &BellProductBasis::new(e.to)).canonical();
    let claimed = e.decomposition.canonical();
    let pass = oracle == claimed && claimed.pairing().is_none_or(|p| p == e.to);
    let detail = if pass {
        format!("{claimed}")
    } else {
        format!("table has {claimed}, oracle gives {oracle}")
    };
    CaseResult { name: case_name(e), pass, detail }
}

pub fn check_table(table: &[TableEntry]) -> Vec<CaseResult> {
    table.iter().map(check_entry).collect()
}

fn expansion(pairing: Pairing, signs: [i64; 4]) -> Decomposition {
    let labels = [(PhiPlus, PsiPlus), (PhiMinus, PsiMinus), (PsiPlus, PhiPlus), (PsiMinus, PhiMinus)];
    let terms = labels
        .iter()
        .zip(signs)
        .map(|(&(a, b), s)| Term {
            product: PairProduct::new(a, b, pairing),
            coefficient: Dyadic::HALF * Dyadic::from_int(s),
        })
        .collect();
    Decomposition { terms }.canonical()
}

/// The four reference expansions: `Φ⁺Ψ⁺` regrouped into the crossed layout,
/// and the crossed outcomes `Φ⁻Ψ⁻`, `Ψ⁺Φ⁺`, `Ψ⁻Φ⁻` regrouped back.
pub fn reference_expansions() -> Vec<(String, PairProduct, Decomposition)> {
    vec![
        ("expansion 1".into(), PairProduct::new(PhiPlus, PsiPlus, Seq), expansion(Crossed, [1, 1, 1, 1])),
        ("expansion 2".into(), PairProduct::new(PhiMinus, PsiMinus, Crossed), expansion(Seq, [1, 1, -1, -1])),
        ("expansion 3".into(), PairProduct::new(PsiPlus, PhiPlus, Crossed), expansion(Seq, [1, -1, 1, -1])),
        ("expansion 4".into(), PairProduct::new(PsiMinus, PhiMinus, Crossed), expansion(Seq, [1, -1, -1, 1])),
    ]
}

fn check_reference() -> Vec<CaseResult> {
    reference_expansions()
        .into_iter()
        .map(|(name, p, expected)| {
            let to = p.pairing.other();
            let algebra = Decomposition::single(p).regroup(to);
            let oracle = project(&build_pair_product(p.first, p.second, p.pairing), &BellProductBasis::new(to)).canonical();
            let pass = algebra == expected && oracle == expected;
            CaseResult { name: format!("{name}: {p}"), pass, detail: format!("{expected}") }
        })
        .collect()
}

/// Two-step outcome tree from the oracle: Eve measures in `eve`, then Bob
/// measures what she resends in `bob`.
pub fn two_step_distribution(
    initial: (BellLabel, BellLabel),
    prepared: Pairing,
    eve: Pairing,
    bob: Pairing,
) -> BTreeMap<(BellLabel, BellLabel), Dyadic> {
    let state = build_pair_product(initial.0, initial.1, prepared);
    let eve_basis = BellProductBasis::new(eve);
    let bob_basis = BellProductBasis::new(bob);
    let mut dist = BTreeMap::new();
    for ((a, b), p) in outcome_probabilities(&state, &eve_basis) {
        let resent = build_pair_product(a, b, eve);
        for (outcome, q) in outcome_probabilities(&resent, &bob_basis) {
            *dist.entry(outcome).or_insert(Dyadic::ZERO) += p * q;
        }
    }
    dist
}

fn check_forbidden() -> Vec<CaseResult> {
    let start = (PhiPlus, PsiPlus);
    let eve: BTreeMap<_, _> =
        outcome_probabilities(&build_pair_product(start.0, start.1, Seq), &BellProductBasis::new(Crossed))
            .into_iter()
            .collect();
    let tree = two_step_distribution(start, Seq, Crossed, Seq);
    let total: Dyadic = tree.values().copied().sum();

    let zero = |dist: &BTreeMap<(BellLabel, BellLabel), Dyadic>, k| dist.get(&k).copied().unwrap_or(Dyadic::ZERO);
    let mut cases = Vec::new();
    let p = zero(&eve, (PsiPlus, PsiMinus));
    cases.push(CaseResult {
        name: "forbidden eve outcome psi+,psi- crossed from phi+,psi+ seq".into(),
        pass: p.is_zero(),
        detail: format!("P = {p}"),
    });
    for k in [(PsiPlus, PhiMinus), (PsiPlus, PsiMinus)] {
        let p = zero(&tree, k);
        cases.push(CaseResult {
            name: format!("forbidden bob outcome {},{} seq after crossed interception", k.0.ascii(), k.1.ascii()),
            pass: p.is_zero() && total == Dyadic::ONE,
            detail: format!("P = {p}, tree total {total}"),
        });
    }
    let wrong: Dyadic = tree.iter().filter(|(k, _)| **k != start).map(|(_, p)| *p).sum();
    cases.push(CaseResult {
        name: "bob error after wrong-layout interception".into(),
        pass: wrong == Dyadic::new(3, 2),
        detail: format!("P = {wrong}"),
    });
    cases
}

/// Runs the oracle equivalence suite on `table` plus the fixed checks.
pub fn verify_with(table: &[TableEntry]) -> VerifyReport {
    let mut cases = check_table(table);
    cases.extend(check_reference());
    cases.extend(check_forbidden());
    VerifyReport { cases }
}

pub fn verify() -> VerifyReport {
    verify_with(&default_table())
}
