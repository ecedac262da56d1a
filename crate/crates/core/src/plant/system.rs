use nalgebra::{DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Delayed state term `A_tau x(t - tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDelay {
    pub a_tau: DMatrix<f64>,
    pub tau: f64,
}

/// One linear plant `x' = A x + A_tau x(t - tau) + B u`, `y = C x(t - tau_out)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemDoc", into = "SystemDoc")]
pub struct StateSpaceSystem {
    label: String,
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: RowDVector<f64>,
    state_delay: Option<StateDelay>,
    output_delay: f64,
}

impl StateSpaceSystem {
    pub fn new(
        label: impl Into<String>,
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: RowDVector<f64>,
    ) -> Result<Self> {
        let label = label.into();
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::field(
                format!("bank[{label}].a"),
                "must be a non-empty square matrix",
            ));
        }
        if b.len() != n {
            return Err(Error::field(
                format!("bank[{label}].b"),
                format!("length {} does not match state dimension {n}", b.len()),
            ));
        }
        if c.len() != n {
            return Err(Error::field(
                format!("bank[{label}].c"),
                format!("length {} does not match state dimension {n}", c.len()),
            ));
        }
        let finite = a.iter().chain(b.iter()).chain(c.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::field(format!("bank[{label}]"), "entries must be finite"));
        }
        Ok(Self {
            label,
            a,
            b,
            c,
            state_delay: None,
            output_delay: 0.0,
        })
    }

    /// Scalar plant `x' = -a x + b u`, `y = x`.
    pub fn first_order(label: impl Into<String>, a: f64, b: f64) -> Result<Self> {
        Self::new(
            label,
            DMatrix::from_element(1, 1, -a),
            DVector::from_element(1, b),
            RowDVector::from_element(1, 1.0),
        )
    }

    pub fn with_state_delay(mut self, a_tau: DMatrix<f64>, tau: f64) -> Result<Self> {
        let n = self.order();
        if a_tau.nrows() != n || a_tau.ncols() != n {
            return Err(Error::field(
                format!("bank[{}].state_delay.a_tau", self.label),
                format!("must be {n}x{n}"),
            ));
        }
        check_delay(&format!("bank[{}].state_delay.tau", self.label), tau)?;
        self.state_delay = Some(StateDelay { a_tau, tau });
        Ok(self)
    }

    pub fn with_output_delay(mut self, tau: f64) -> Result<Self> {
        check_delay(&format!("bank[{}].output_delay", self.label), tau)?;
        self.output_delay = tau;
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &RowDVector<f64> {
        &self.c
    }

    pub fn state_delay(&self) -> Option<&StateDelay> {
        self.state_delay.as_ref()
    }

    pub fn output_delay(&self) -> f64 {
        self.output_delay
    }

    /// All eigenvalues of `A` have strictly negative real part.
    pub fn is_hurwitz(&self) -> bool {
        self.a
            .clone()
            .complex_eigenvalues()
            .iter()
            .all(|l| l.re < 0.0)
    }

    /// Steady-state gain `-C (A + A_tau)^-1 B`, if the matrix is invertible.
    pub fn dc_gain(&self) -> Option<f64> {
        let mut a = self.a.clone();
        if let Some(d) = &self.state_delay {
            a += &d.a_tau;
        }
        let x = a.lu().solve(&self.b)?;
        Some(-(&self.c * x)[0])
    }

    /// Right-hand side of the state equation with the delayed state supplied.
    pub(crate) fn derivative(
        &self,
        x: &DVector<f64>,
        x_delayed: Option<&DVector<f64>>,
        u: f64,
    ) -> DVector<f64> {
        let mut dx = &self.a * x + &self.b * u;
        if let (Some(d), Some(xd)) = (&self.state_delay, x_delayed) {
            dx += &d.a_tau * xd;
        }
        dx
    }

    pub(crate) fn output(&self, x: &DVector<f64>) -> f64 {
        (&self.c * x)[0]
    }
}

fn check_delay(key: &str, tau: f64) -> Result<()> {
    if tau.is_finite() && tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::field(key, "must be finite and >= 0"))
    }
}

/// JSON form of a plant: matrices as row-major nested arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    label: String,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    state_delay: Option<StateDelayDoc>,
    #[serde(default)]
    output_delay: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDelayDoc {
    a_tau: Vec<Vec<f64>>,
    tau: f64,
}

fn matrix_from_rows(key: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::field(key, "rows must have equal length"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl TryFrom<SystemDoc> for StateSpaceSystem {
    type Error = Error;

    fn try_from(doc: SystemDoc) -> Result<Self> {
        let a = matrix_from_rows(&format!("bank[{}].a", doc.label), &doc.a)?;
        let mut sys = StateSpaceSystem::new(
            doc.label,
            a,
            DVector::from_vec(doc.b),
            RowDVector::from_vec(doc.c),
        )?;
        if let Some(sd) = doc.state_delay {
            let a_tau =
                matrix_from_rows(&format!("bank[{}].state_delay.a_tau", sys.label), &sd.a_tau)?;
            sys = sys.with_state_delay(a_tau, sd.tau)?;
        }
        sys.with_output_delay(doc.output_delay)
    }
}

impl From<StateSpaceSystem> for SystemDoc {
    fn from(sys: StateSpaceSystem) -> Self {
        SystemDoc {
            a: matrix_to_rows(&sys.a),
            b: sys.b.iter().copied().collect(),
            c: sys.c.iter().copied().collect(),
            state_delay: sys.state_delay.map(|d| StateDelayDoc {
                a_tau: matrix_to_rows(&d.a_tau),
                tau: d.tau,
            }),
            output_delay: sys.output_delay,
            label: sys.label,
        }
    }
}
