//! Two-body kinematics of n + ³He → p + ³H at thermal energy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Triton-to-proton mass ratio used for the momentum-balance check.
pub const TRITON_PROTON_MASS_RATIO: f64 = 2.9937;

/// Allowed mismatch between the product energies and the Q-value.
pub const ENERGY_SUM_TOLERANCE_KEV: f64 = 1.0;

/// Allowed relative deviation of `E_p / E_t` from the mass ratio.
pub const MOMENTUM_RATIO_TOLERANCE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Product {
    Proton,
    Triton,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReactionKinematics {
    pub q_value_kev: f64,
    pub product_energies_kev: BTreeMap<Product, f64>,
}

impl ReactionKinematics {
    pub fn new(q_value_kev: f64, proton_kev: f64, triton_kev: f64) -> Self {
        ReactionKinematics {
            q_value_kev,
            product_energies_kev: [(Product::Proton, proton_kev), (Product::Triton, triton_kev)]
                .into(),
        }
    }

    /// 764 keV shared as 573 keV (p) and 191 keV (³H).
    pub fn thermal_capture() -> Self {
        Self::new(764.0, 573.0, 191.0)
    }

    /// Nonrelativistic split of `q` between back-to-back products at rest
    /// in the lab: each takes the share of the other's mass.
    pub fn two_body_split(q_value_kev: f64) -> Self {
        let proton = q_value_kev * TRITON_PROTON_MASS_RATIO / (1.0 + TRITON_PROTON_MASS_RATIO);
        Self::new(q_value_kev, proton, q_value_kev - proton)
    }

    fn energy(&self, product: Product) -> f64 {
        self.product_energies_kev
            .get(&product)
            .copied()
            .unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KinematicsCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KinematicsReport {
    pub passed: bool,
    pub checks: Vec<KinematicsCheck>,
}

impl KinematicsReport {
    pub fn check(&self, name: &str) -> Option<&KinematicsCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Verifies the energy sum and the two-body momentum balance.
pub fn check_kinematics(k: &ReactionKinematics) -> KinematicsReport {
    let ep = k.energy(Product::Proton);
    let et = k.energy(Product::Triton);

    let sum = ep + et;
    let sum_ok = (sum - k.q_value_kev).abs() <= ENERGY_SUM_TOLERANCE_KEV;
    let energy = KinematicsCheck {
        name: "energy_sum",
        passed: sum_ok,
        detail: format!(
            "E_p + E_t = {sum} keV vs Q = {} keV (tolerance {ENERGY_SUM_TOLERANCE_KEV} keV)",
            k.q_value_kev
        ),
    };

    // Equal momenta: E_p / E_t = m_t / m_p.
    let (ratio_ok, detail) = if et > 0.0 && ep > 0.0 {
        let ratio = ep / et;
        let deviation = ratio / TRITON_PROTON_MASS_RATIO - 1.0;
        (
            deviation.abs() <= MOMENTUM_RATIO_TOLERANCE,
            format!(
                "E_p / E_t = {ratio:.4} vs m_t / m_p = {TRITON_PROTON_MASS_RATIO} (deviation {:.3}%, tolerance {}%)",
                deviation * 100.0,
                MOMENTUM_RATIO_TOLERANCE * 100.0
            ),
        )
    } else {
        (false, "product energies must be positive".to_string())
    };
    let momentum = KinematicsCheck {
        name: "momentum_balance",
        passed: ratio_ok,
        detail,
    };

    KinematicsReport {
        passed: sum_ok && ratio_ok,
        checks: vec![energy, momentum],
    }
}
