use std::borrow::Cow;
use std::sync::Arc;

use nalgebra_sparse::CsrMatrix;

use crate::linalg::{csr_from_triplets, matvec, quad_form, Vector};
use crate::mesh::TriMesh;

use super::element::contract;
use super::{DofMap, Element, Lame, StrainComponents};

/// Pointwise viscosity law `e -> A(e)`, the strain gradient of a convex potential.
///
/// Implementations must be strongly monotone and Lipschitz so that the viscous
/// operator inherits the coercivity and continuity the step solver relies on.
pub trait ViscousLaw: Send + Sync {
    fn stress(&self, strain: StrainComponents) -> StrainComponents;
    /// Directional derivative of the stress at `strain` along `direction`.
    fn stress_derivative(&self, strain: StrainComponents, direction: StrainComponents) -> StrainComponents;
    /// Potential whose gradient is the stress, vanishing at zero strain.
    fn potential(&self, strain: StrainComponents) -> f64;
}

/// Linear isotropic law, equivalent to the assembled viscous matrix.
#[derive(Clone, Copy, Debug)]
pub struct IsotropicViscous(pub Lame);

impl ViscousLaw for IsotropicViscous {
    fn stress(&self, strain: StrainComponents) -> StrainComponents {
        self.0.apply(strain)
    }
    fn stress_derivative(&self, _: StrainComponents, direction: StrainComponents) -> StrainComponents {
        self.0.apply(direction)
    }
    fn potential(&self, strain: StrainComponents) -> f64 {
        0.5 * contract(self.0.apply(strain), strain)
    }
}

#[derive(Clone, Debug)]
struct StrainElement {
    area: f64,
    free: [Option<usize>; 6],
    strains: [StrainComponents; 6],
}

/// Viscous operator driven by a general law, acting on free dofs.
#[derive(Clone)]
pub struct NonlinearViscous {
    elements: Vec<StrainElement>,
    law: Arc<dyn ViscousLaw>,
    n: usize,
}

impl std::fmt::Debug for NonlinearViscous {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlinearViscous").field("elements", &self.elements.len()).field("n", &self.n).finish()
    }
}

impl NonlinearViscous {
    pub fn new(mesh: &TriMesh, dofmap: &DofMap, law: Arc<dyn ViscousLaw>) -> Self {
        let elements = (0..mesh.n_triangles())
            .map(|t| {
                let el = Element::new(mesh, t);
                StrainElement {
                    area: el.area,
                    free: el.dofs().map(|d| dofmap.full_to_free[d]),
                    strains: el.strains(),
                }
            })
            .collect();
        NonlinearViscous { elements, law, n: dofmap.n_free() }
    }

    fn strain(el: &StrainElement, u: &Vector) -> StrainComponents {
        let mut e = [0.0; 3];
        for (s, d) in el.strains.iter().zip(&el.free) {
            if let Some(i) = d {
                for c in 0..3 {
                    e[c] += s[c] * u[*i];
                }
            }
        }
        e
    }
}

/// Viscous operator on free dofs: the assembled matrix or a general law.
#[derive(Clone, Debug)]
pub enum ViscousOperator {
    Linear(CsrMatrix<f64>),
    Nonlinear(NonlinearViscous),
}

impl ViscousOperator {
    pub fn dim(&self) -> usize {
        match self {
            ViscousOperator::Linear(b) => b.nrows(),
            ViscousOperator::Nonlinear(n) => n.n,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, ViscousOperator::Linear(_))
    }

    /// Potential of the operator at `u`.
    pub fn energy(&self, u: &Vector) -> f64 {
        match self {
            ViscousOperator::Linear(b) => 0.5 * quad_form(b, u),
            ViscousOperator::Nonlinear(n) => {
                n.elements.iter().map(|el| el.area * n.law.potential(NonlinearViscous::strain(el, u))).sum()
            }
        }
    }

    /// `B(u)`.
    pub fn apply(&self, u: &Vector) -> Vector {
        match self {
            ViscousOperator::Linear(b) => matvec(b, u),
            ViscousOperator::Nonlinear(n) => {
                let mut out = Vector::zeros(n.n);
                for el in &n.elements {
                    let s = n.law.stress(NonlinearViscous::strain(el, u));
                    for (row, d) in el.strains.iter().zip(&el.free) {
                        if let Some(i) = d {
                            out[*i] += el.area * contract(s, *row);
                        }
                    }
                }
                out
            }
        }
    }

    /// Jacobian of `B` at `u`.
    pub fn tangent(&self, u: &Vector) -> Cow<'_, CsrMatrix<f64>> {
        match self {
            ViscousOperator::Linear(b) => Cow::Borrowed(b),
            ViscousOperator::Nonlinear(n) => {
                let mut triplets = Vec::with_capacity(36 * n.elements.len());
                for el in &n.elements {
                    let e = NonlinearViscous::strain(el, u);
                    for (j, dj) in el.free.iter().enumerate() {
                        let Some(j_free) = dj else { continue };
                        let ds = n.law.stress_derivative(e, el.strains[j]);
                        for (i, di) in el.free.iter().enumerate() {
                            if let Some(i_free) = di {
                                triplets.push((*i_free, *j_free, el.area * contract(ds, el.strains[i])));
                            }
                        }
                    }
                }
                Cow::Owned(csr_from_triplets(n.n, &triplets))
            }
        }
    }
}
