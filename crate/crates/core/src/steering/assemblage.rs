use num_complex::Complex64;

use super::mesh::DirectionMesh;
use crate::qmat::{
    hermitian_eigenvalues, partial_trace_matrix, qubit_coords, qubit_lambda_min, qubit_operator,
    swap_matrix, ComplexMatrix, Side,
};
use crate::{Error, Result};

/// Completeness slack: `Σ_a σ_{a|k}` must agree across settings to this.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Bob-side conditional sub-states `σ_{a|k}`, `a ∈ {+, -}`, one pair per
/// measurement axis of the steering party.
#[derive(Clone, Debug)]
pub struct Assemblage {
    blocks: Vec<[ComplexMatrix; 2]>,
    source_state_psd: bool,
}

impl Assemblage {
    /// Wraps precomputed blocks after checking completeness and unit trace.
    pub fn from_blocks(blocks: Vec<[ComplexMatrix; 2]>, source_state_psd: bool) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidState("assemblage has no settings".into()));
        }
        for pair in &blocks {
            for b in pair {
                b.check_dim(2)?;
                let defect = b.hermiticity_defect();
                if defect > 1e-9 {
                    return Err(Error::NonHermitianInput(defect));
                }
            }
        }
        let asm = Self {
            blocks,
            source_state_psd,
        };
        let defect = asm.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::InvalidState(format!(
                "assemblage marginals differ across settings by {defect:e}"
            )));
        }
        let tr = asm.total().trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::InvalidState(format!("assemblage trace {tr} is not 1")));
        }
        if source_state_psd {
            let worst = asm
                .blocks
                .iter()
                .flatten()
                .map(qubit_lambda_min)
                .fold(f64::INFINITY, f64::min);
            if worst < -1e-10 {
                return Err(Error::InvalidState(format!(
                    "block has negative eigenvalue {worst:e}"
                )));
            }
        }
        Ok(asm)
    }

    pub fn blocks(&self) -> &[[ComplexMatrix; 2]] {
        &self.blocks
    }

    pub fn n_settings(&self) -> usize {
        self.blocks.len()
    }

    pub fn source_state_psd(&self) -> bool {
        self.source_state_psd
    }

    /// `Σ_a σ_{a|0}`, Bob's reduced operator.
    pub fn total(&self) -> ComplexMatrix {
        &self.blocks[0][0] + &self.blocks[0][1]
    }

    pub fn completeness_defect(&self) -> f64 {
        let first = self.total();
        self.blocks
            .iter()
            .map(|[p, m]| (p + m).max_abs_diff(&first))
            .fold(0.0, f64::max)
    }

    /// Right-hand side of the LHS feasibility LP: Pauli coordinates of each
    /// `σ_{+|k}`, then of the total.
    pub fn lp_rhs(&self) -> Vec<f64> {
        let mut rhs = Vec::with_capacity(4 * self.blocks.len() + 4);
        for [plus, _] in &self.blocks {
            rhs.extend_from_slice(&qubit_coords(plus));
        }
        rhs.extend_from_slice(&qubit_coords(&self.total()));
        rhs
    }
}

/// `Π_{±n} = (I ± n·σ)/2`.
pub fn projector(n: [f64; 3], sign: f64) -> ComplexMatrix {
    qubit_operator(0.5, [0.5 * sign * n[0], 0.5 * sign * n[1], 0.5 * sign * n[2]])
}

/// Conditional states `σ_{±|k} = Tr_A[(Π_{±n_k} ⊗ I) χ]` for the given
/// steering party. `χ` must be Hermitian with unit trace; positivity is not
/// required.
pub fn assemblage(
    chi: &ComplexMatrix,
    mesh: &DirectionMesh,
    steering_party: Side,
) -> Result<Assemblage> {
    chi.check_dim(4)?;
    let defect = chi.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::NonHermitianInput(defect));
    }
    let chi = match steering_party {
        Side::A => chi.hermitian_part(),
        Side::B => swap_matrix(chi)?.hermitian_part(),
    };
    let psd = *hermitian_eigenvalues(&chi)?.last().unwrap() >= -1e-10;
    let id = ComplexMatrix::identity(2);
    let mut blocks = Vec::with_capacity(mesh.len());
    for &n in mesh.directions() {
        let plus = conditional(&chi, &projector(n, 1.0), &id)?;
        let minus = conditional(&chi, &projector(n, -1.0), &id)?;
        blocks.push([plus, minus]);
    }
    Assemblage::from_blocks(blocks, psd)
}

fn conditional(
    chi: &ComplexMatrix,
    effect: &ComplexMatrix,
    id: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let lifted = effect.kron(id);
    Ok(partial_trace_matrix(&(&lifted * chi), Side::A)?.hermitian_part())
}

/// Reconstructs `Σ_a tr(F_a σ_a)` summed over settings for real-coordinate
/// functionals, used by certificate checks.
pub(crate) fn pairing(f: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += f[(i, j)] * sigma[(j, i)];
        }
    }
    acc.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::psi_plus_projector;
    use crate::states::{family_matrix, werner_state};
    use crate::steering::mesh::{fibonacci_mesh, octahedral_mesh};

    #[test]
    fn mixed_state_blocks() {
        let chi = ComplexMatrix::identity(4).scale(0.25);
        let asm = assemblage(&chi, &fibonacci_mesh(7).unwrap(), Side::A).unwrap();
        let quarter = ComplexMatrix::identity(2).scale(0.25);
        for pair in asm.blocks() {
            for b in pair {
                assert!(b.max_abs_diff(&quarter) < 1e-15);
            }
        }
    }

    #[test]
    fn singlet_z_blocks() {
        let mesh = DirectionMesh::from_directions(vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        let asm = assemblage(&psi_plus_projector(), &mesh, Side::A).unwrap();
        let [plus, minus] = &asm.blocks()[0];
        assert!(plus.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.0, 0.5])) < 1e-15);
        assert!(minus.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 0.0])) < 1e-15);
    }

    #[test]
    fn family_z_blocks_match_bloch_contraction() {
        // σ_{±|z} = ¼[(1 ± a_z) I ± T_zz σz] with a_z = (1-p) r, T_zz = -p
        let (p, r) = (0.4, 0.8);
        let mesh = octahedral_mesh();
        let asm = assemblage(&family_matrix(p, r), &mesh, Side::A).unwrap();
        let az = (1.0 - p) * r;
        let tzz = -p;
        assert!((az - 0.48).abs() < 1e-15);
        for (idx, s) in [(0usize, 1.0), (1usize, -1.0)] {
            let want = qubit_operator(0.25 * (1.0 + s * az), [0.0, 0.0, 0.25 * s * tzz]);
            assert!(asm.blocks()[2][idx].max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn completeness_and_psd_flag() {
        let asm = assemblage(
            werner_state(0.7).unwrap().matrix(),
            &fibonacci_mesh(12).unwrap(),
            Side::B,
        )
        .unwrap();
        assert!(asm.completeness_defect() < 1e-15);
        assert!(asm.source_state_psd());
        let non_psd = crate::states::depolarize_alice_matrix(&psi_plus_projector(), 1.5).unwrap();
        let asm = assemblage(&non_psd, &octahedral_mesh(), Side::A).unwrap();
        assert!(!asm.source_state_psd());
    }

    #[test]
    fn rejects_incomplete_blocks() {
        let a = ComplexMatrix::identity(2).scale(0.25);
        let b = ComplexMatrix::identity(2).scale(0.3);
        let r = Assemblage::from_blocks(vec![[a.clone(), a.clone()], [a, b]], true);
        assert!(matches!(r, Err(Error::InvalidState(_))));
    }
}
