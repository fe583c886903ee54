//! Extension descriptors, validation, dispatch to the case spaces, descriptor
//! equivalence and the explicit model of the prime-to-p residual case.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group_ring::{is_prime, valuation, GroupRingElem};
use crate::invariants::{
    lattice_character, measure_lattice, measure_report, InvResult, InvariantError, InvariantReport,
};
use crate::presentation::{ElementExpr, LatticeModel, Presentation};
use crate::spaces::{
    case_torsion_generator, default_precisions, expected_invariants, make_case_presentation,
    CaseId, FormalSpaceParams, SpaceError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("invalid descriptor: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("{0}")]
    WrongResidual(String),
}

pub type ClassifyResult<T> = Result<T, ClassifyError>;

fn default_true() -> bool {
    true
}

fn default_one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionDescriptor {
    pub p: u64,
    pub n: u32,
    #[serde(default = "default_true")]
    pub residual_char_is_p: bool,
    #[serde(default = "default_one")]
    pub d: u32,
    pub a: u32,
    pub b: u32,
    pub m: u32,
    pub kappa: i64,
    #[serde(default)]
    pub procyclic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus_one_is_norm: Option<bool>,
}

/// Quantities read off a valid descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derived {
    pub k_sigma: i128,
    /// |μ_F| = p^mu_f_exponent
    pub mu_f_exponent: u32,
    /// |μ_K ∩ N(F^×)| = p^(a-b)
    pub mu_k_norm_exponent: u32,
}

impl ExtensionDescriptor {
    pub fn new(p: u64, n: u32, a: u32, b: u32, m: u32, kappa: i64) -> Self {
        ExtensionDescriptor {
            p,
            n,
            residual_char_is_p: true,
            d: 1,
            a,
            b,
            m,
            kappa,
            procyclic: false,
            l: None,
            minus_one_is_norm: None,
        }
    }

    /// p = 2, a = 1
    pub fn two_adic_special(&self) -> bool {
        self.p == 2 && self.a == 1
    }

    /// Special case 2 with μ_F larger than μ_K.
    pub fn special_case_two(&self) -> bool {
        self.two_adic_special() && !self.procyclic && self.m >= 1 && self.residual_char_is_p
    }

    pub fn k_sigma(&self) -> i128 {
        1 + self.kappa as i128 * (self.p as i128).pow(self.a)
    }

    pub fn params(&self) -> FormalSpaceParams {
        FormalSpaceParams {
            p: self.p,
            n: self.n,
            a: self.a,
            b: self.b,
            m: self.m,
            kappa: self.kappa,
            l: self.l,
        }
    }

    pub fn mu_f_exponent(&self) -> u32 {
        match self.l {
            Some(l) if self.two_adic_special() && self.m >= 1 => l + self.m - 1,
            _ => self.a + self.m,
        }
    }
}

/// Every violated constraint, by name.
pub fn descriptor_violations(desc: &ExtensionDescriptor) -> Vec<String> {
    let mut v: Vec<String> = Vec::new();
    let mut need = |ok: bool, name: &str| {
        if !ok {
            v.push(name.to_string());
        }
    };
    need(is_prime(desc.p), "p prime");
    need(desc.n >= 1, "n ≥ 1");
    need(desc.d >= 1, "d ≥ 1");
    need(
        desc.p < 2 || (desc.kappa as i128).rem_euclid(desc.p as i128) != 0,
        "κ unit mod p",
    );
    need(desc.b <= desc.a.min(desc.n), "b ≤ min(a,n)");
    need(desc.m + desc.b <= desc.n, "m+b ≤ n");
    need(desc.p != 2 || desc.a >= 1, "a ≥ 1 when p = 2");
    need(desc.a >= 1 || desc.m == 0, "m = 0 when a = 0");
    if !desc.residual_char_is_p {
        need(desc.n == desc.m + desc.b, "n = m+b");
        need(desc.d == 1, "d = 1 when residual char ≠ p");
        if desc.two_adic_special() && desc.m >= 1 {
            need(desc.procyclic, "procyclic when residual char ≠ p");
        }
    }
    if desc.special_case_two() {
        need(desc.m <= 1, "m ≤ 1 in special case 2");
        if desc.n >= 2 {
            need(desc.d % 2 == 0, "d even in Case 6");
        } else if let Some(norm) = desc.minus_one_is_norm {
            need(
                norm == (desc.d % 2 == 0),
                "minus_one_is_norm = (d even) when n = 1",
            );
        }
    }
    if let Some(l) = desc.l {
        need(l >= 2, "l ≥ 2");
    }
    if desc.two_adic_special() && desc.m >= 1 {
        need(desc.l.is_some(), "l given when p = 2, a = 1, m ≥ 1");
        if let Some(l) = desc.l {
            let v2 = valuation(2, desc.kappa as i128 + 1);
            if desc.procyclic {
                need(
                    v2.map(|x| x + 2) == Some(l),
                    "l = v_2(κ+1)+2 when procyclic",
                );
            } else {
                need(
                    v2.is_none_or(|x| x + 1 >= l),
                    "κ ≡ −1 mod 2^(l−1) when not procyclic",
                );
            }
        }
    }
    let w_type = !(desc.special_case_two() && desc.m == 1);
    if desc.two_adic_special() && w_type {
        need(desc.kappa != -1, "κ ≠ −1");
    }
    v
}

pub fn validate_descriptor(desc: &ExtensionDescriptor) -> ClassifyResult<Derived> {
    let v = descriptor_violations(desc);
    if !v.is_empty() {
        return Err(ClassifyError::Invalid(v));
    }
    Ok(Derived {
        k_sigma: desc.k_sigma(),
        mu_f_exponent: desc.mu_f_exponent(),
        mu_k_norm_exponent: desc.a - desc.b,
    })
}

/// Case dispatch for a valid descriptor.
pub fn dispatch(desc: &ExtensionDescriptor) -> CaseId {
    if !desc.residual_char_is_p {
        return CaseId::Case7;
    }
    if desc.two_adic_special() && !desc.procyclic && desc.m == 1 {
        return if desc.n == 1 {
            if desc.d % 2 == 1 {
                CaseId::Case3_3a
            } else {
                CaseId::Case3_3b
            }
        } else if desc.minus_one_is_norm.unwrap_or(false) {
            CaseId::Case6_norm
        } else {
            CaseId::Case6_nonorm
        };
    }
    if desc.m == desc.n {
        CaseId::Case3_2
    } else if desc.a + desc.m == 0 {
        CaseId::Case1
    } else if desc.m == 0 {
        if desc.b == 0 {
            CaseId::Case2
        } else {
            CaseId::Case4
        }
    } else {
        CaseId::Case5
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub case: CaseId,
    pub descriptor: ExtensionDescriptor,
    pub derived: Derived,
    /// case space ⊕ Z_p[G]^{d-1}
    pub presentation: Presentation,
    pub torsion_generator: ElementExpr,
    /// b = 0: ⟨X⟩ splits off
    pub splitting: bool,
    pub expected: InvariantReport,
}

/// The expected report of the case space plus d - 1 free summands.
pub fn expected_for(desc: &ExtensionDescriptor, case: CaseId) -> InvariantReport {
    let mut rep = expected_invariants(case, &desc.params());
    let extra = (desc.d - 1) as usize;
    for m in rep.character.iter_mut() {
        *m += extra;
    }
    rep.zp_rank += extra * desc.p.pow(desc.n) as usize;
    rep
}

pub fn classify(desc: &ExtensionDescriptor) -> ClassifyResult<Classification> {
    let derived = validate_descriptor(desc)?;
    let case = dispatch(desc);
    let params = desc.params();
    let space = make_case_presentation(case, &params)?;
    let extra = (desc.d - 1) as usize;
    let presentation = space.with_free_summands(extra).map_err(SpaceError::from)?;
    let mut xi = case_torsion_generator(case, &params)?;
    let ctx = presentation.ctx();
    xi.exponents
        .extend(std::iter::repeat_n(GroupRingElem::zero(ctx), extra));
    Ok(Classification {
        case,
        descriptor: desc.clone(),
        derived,
        presentation,
        torsion_generator: xi,
        splitting: desc.b == 0,
        expected: expected_for(desc, case),
    })
}

/// Precisions used when measuring a descriptor's presentation.
pub fn descriptor_precisions(desc: &ExtensionDescriptor) -> (u32, u32) {
    default_precisions(&desc.params())
}

pub fn measure_classification(c: &Classification, k1: u32, k2: u32) -> InvResult<InvariantReport> {
    measure_report(&c.presentation, k1, k2, Some(&c.torsion_generator))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    pub equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Same |μ_F|, same k_σ mod |μ_F|, same a - b, same residual class and, for
/// residual characteristic p, the same d.
pub fn equivalent(d1: &ExtensionDescriptor, d2: &ExtensionDescriptor) -> Equivalence {
    let no = |why: &str| Equivalence {
        equivalent: false,
        reason: Some(why.to_string()),
    };
    if d1.p != d2.p || d1.n != d2.n {
        return no("different p or n");
    }
    let (Ok(v1), Ok(v2)) = (validate_descriptor(d1), validate_descriptor(d2)) else {
        return no("invalid descriptor");
    };
    if d1.residual_char_is_p != d2.residual_char_is_p {
        return no("residual characteristic class differs");
    }
    if v1.mu_f_exponent != v2.mu_f_exponent {
        return no("|μ_F| differs");
    }
    let modulus = (d1.p as i128).pow(v1.mu_f_exponent);
    if v1.k_sigma.rem_euclid(modulus) != v2.k_sigma.rem_euclid(modulus) {
        return no("k_σ differs mod |μ_F|");
    }
    if v1.mu_k_norm_exponent != v2.mu_k_norm_exponent {
        return no("|μ_K ∩ N(F^×)| differs");
    }
    if d1.residual_char_is_p && d1.d != d2.d {
        return no("d differs");
    }
    Equivalence {
        equivalent: true,
        reason: None,
    }
}

/// F^× = π_F^{Z_p} × μ_F with (π_F^α ξ_F^β)^σ = π_F^α ξ_F^{p^δ α + k_σ β}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcreteModel {
    pub p: u64,
    pub n: u32,
    /// |μ_F| = p^torsion_exponent
    pub torsion_exponent: u32,
    pub delta: u32,
    pub k_sigma: i128,
}

impl ConcreteModel {
    pub fn torsion_modulus(&self) -> i128 {
        (self.p as i128).pow(self.torsion_exponent)
    }

    /// Image of (α, β) under σ, β reduced mod |μ_F|.
    pub fn act(&self, alpha: i128, beta: i128) -> (i128, i128) {
        let m = self.torsion_modulus();
        let pd = (self.p as i128).pow(self.delta);
        (
            alpha,
            (pd * alpha + self.k_sigma.rem_euclid(m) * beta).rem_euclid(m),
        )
    }

    /// σ applied p^n times fixes both basis vectors.
    pub fn action_has_order_dividing_pn(&self) -> bool {
        let q = self.p.pow(self.n);
        [(1i128, 0i128), (0, 1)].iter().all(|&(a, b)| {
            let mut v = (a, b);
            for _ in 0..q {
                v = self.act(v.0, v.1);
            }
            v == (a, b.rem_euclid(self.torsion_modulus()))
        })
    }

    /// Exact order of σ on the model.
    pub fn action_order(&self) -> u64 {
        let mut v = [(1i128, 0i128), (0, 1)];
        let mut k = 0u64;
        loop {
            v = v.map(|(a, b)| self.act(a, b));
            k += 1;
            if v == [(1, 0), (0, 1)] || k > self.p.pow(self.n + self.torsion_exponent) {
                return k;
            }
        }
    }

    /// Lattice form: ambient Z_p², relation (0, p^t), σ = [[1, p^δ], [0, k_σ]].
    pub fn lattice(&self) -> LatticeModel {
        let m = self.torsion_modulus();
        LatticeModel {
            p: self.p,
            n: self.n,
            ambient: 2,
            relations: vec![vec![0, m]],
            sigma: vec![
                vec![1, (self.p as i128).pow(self.delta)],
                vec![0, self.k_sigma.rem_euclid(m)],
            ],
            origin: vec![(0, 0)],
        }
    }
}

pub fn case7_concrete(desc: &ExtensionDescriptor) -> ClassifyResult<ConcreteModel> {
    if desc.residual_char_is_p {
        return Err(ClassifyError::WrongResidual(
            "the concrete model needs residual characteristic ≠ p".into(),
        ));
    }
    validate_descriptor(desc)?;
    let special = desc.two_adic_special() && desc.m >= 1;
    let (torsion_exponent, delta) = match desc.l {
        // b = 1: π_F is not a 2^n-th root of an element of K here, and
        // l - b - 1 would make σ² act trivially; δ = 0 is the only faithful choice.
        Some(l) if special && desc.b == 1 => (l + desc.m - 1, 0),
        Some(l) if special => (l + desc.m - 1, l - desc.b - 1),
        _ => (desc.a + desc.m, desc.a - desc.b),
    };
    Ok(ConcreteModel {
        p: desc.p,
        n: desc.n,
        torsion_exponent,
        delta,
        k_sigma: desc.k_sigma(),
    })
}

/// Report of the concrete model, measured at K and K + 2; the torsion
/// generator is ξ_F and the character comes from the rational rank of the
/// σ-action.
pub fn concrete_invariants(model: &ConcreteModel, k: u32) -> InvResult<InvariantReport> {
    let lat = model.lattice();
    measure_lattice(&lat, lattice_character(&lat), k, k + 2, Some(&[0, 1]))
}
