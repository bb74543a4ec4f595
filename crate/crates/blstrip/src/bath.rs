//! Square-lattice bosonic bath: Hamiltonian construction, reflection-symmetry
//! decomposition, and energy-window truncation.
//!
//! Sites use centered coordinates (x, y) in [-(L-1)/2, (L-1)/2]^2 so the two
//! reflections are literal sign/coordinate flips. Each orbit of sites under
//! the reflection pair yields up to four symmetry-adapted modes, one per
//! sector (s1, s2); collecting them block-diagonalizes the bath Hamiltonian.

use crate::numerics::{sym_eig, NumericsError, RMat};
use ndarray::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BathError {
    #[error("lattice side length must be odd and >= 3, got {0}")]
    BadSideLength(usize),
    #[error("hopping rate must be positive, got {0}")]
    BadHopping(f64),
    #[error("empty energy window: no eigenmode within {half_width} of {omega0}; nearest eigenvalue is {nearest}")]
    EmptyWindow { omega0: f64, half_width: f64, nearest: f64 },
    #[error("energy window half-width must be positive, got {0}")]
    BadWindow(f64),
    #[error("discarded mode at {energy} is degenerate with the window center {omega0}")]
    LambShiftDivergence { energy: f64, omega0: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Periodic square-lattice bath with nearest-neighbour hopping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    /// Odd side length; the lattice has l*l sites centered on (0, 0).
    pub l: usize,
    /// Nearest-neighbour hopping rate (energy units), > 0.
    pub j: f64,
}

impl BathSpec {
    pub fn new(l: usize, j: f64) -> Result<Self, BathError> {
        if l < 3 || l % 2 == 0 {
            return Err(BathError::BadSideLength(l));
        }
        if !(j > 0.0) || !j.is_finite() {
            return Err(BathError::BadHopping(j));
        }
        Ok(BathSpec { l, j })
    }

    pub fn num_sites(&self) -> usize {
        self.l * self.l
    }

    pub fn half(&self) -> i32 {
        (self.l as i32 - 1) / 2
    }

    /// Row-major index of the centered coordinate (x, y).
    pub fn site_index(&self, x: i32, y: i32) -> usize {
        let h = self.half();
        debug_assert!(x.abs() <= h && y.abs() <= h);
        ((x + h) as usize) * self.l + (y + h) as usize
    }

    pub fn site_coords(&self, idx: usize) -> (i32, i32) {
        let h = self.half();
        ((idx / self.l) as i32 - h, (idx % self.l) as i32 - h)
    }

    /// The four periodic nearest neighbours of (x, y).
    pub fn neighbours(&self, x: i32, y: i32) -> [(i32, i32); 4] {
        let h = self.half();
        let l = self.l as i32;
        let wrap = |v: i32| {
            if v > h {
                v - l
            } else if v < -h {
                v + l
            } else {
                v
            }
        };
        [
            (wrap(x + 1), y),
            (wrap(x - 1), y),
            (x, wrap(y + 1)),
            (x, wrap(y - 1)),
        ]
    }
}

/// Tight-binding dispersion -2J (cos kx + cos ky).
pub fn dispersion(kx: f64, ky: f64, j: f64) -> f64 {
    -2.0 * j * (kx.cos() + ky.cos())
}

/// Dense bath Hamiltonian; intended for small lattices (oracles and tests).
pub fn build_bath(spec: &BathSpec) -> Result<RMat, BathError> {
    BathSpec::new(spec.l, spec.j)?;
    let n = spec.num_sites();
    let mut h = RMat::zeros((n, n));
    for idx in 0..n {
        let (x, y) = spec.site_coords(idx);
        for (nx, ny) in spec.neighbours(x, y) {
            h[[idx, spec.site_index(nx, ny)]] = -spec.j;
        }
    }
    Ok(h)
}

/// The pair of commuting reflections used to split the bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryAxes {
    /// Reflections across the two lattice diagonals x = y and x = -y.
    Diagonals,
    /// Reflections across the vertical (x -> -x) and horizontal (y -> -y)
    /// axes.
    Axes,
}

impl SymmetryAxes {
    fn reflect1(&self, (x, y): (i32, i32)) -> (i32, i32) {
        match self {
            SymmetryAxes::Diagonals => (y, x),
            SymmetryAxes::Axes => (-x, y),
        }
    }

    fn reflect2(&self, (x, y): (i32, i32)) -> (i32, i32) {
        match self {
            SymmetryAxes::Diagonals => (-y, -x),
            SymmetryAxes::Axes => (x, -y),
        }
    }
}

/// Symmetry sector label: character under each of the two reflections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorLabel {
    pub s1: bool,
    pub s2: bool,
}

impl SectorLabel {
    pub const ALL: [SectorLabel; 4] = [
        SectorLabel { s1: true, s2: true },
        SectorLabel { s1: true, s2: false },
        SectorLabel { s1: false, s2: true },
        SectorLabel { s1: false, s2: false },
    ];

    pub fn index(&self) -> usize {
        (!self.s1 as usize) * 2 + (!self.s2 as usize)
    }

    pub fn name(&self) -> &'static str {
        match (self.s1, self.s2) {
            (true, true) => "++",
            (true, false) => "+-",
            (false, true) => "-+",
            (false, false) => "--",
        }
    }

    pub fn from_name(name: &str) -> Option<SectorLabel> {
        SectorLabel::ALL.iter().copied().find(|s| s.name() == name)
    }
}

impl std::fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One symmetry-adapted mode: a signed, normalized combination of the sites
/// of one reflection orbit.
#[derive(Debug, Clone)]
pub struct OrbitMode {
    /// Lexicographically smallest member of the orbit.
    pub rep: (i32, i32),
    /// (site index, coefficient), sorted by site coordinates.
    pub members: Vec<(usize, f64)>,
}

/// All modes of one sector, in orbit-representative order.
#[derive(Debug, Clone)]
pub struct SectorModes {
    pub label: SectorLabel,
    pub modes: Vec<OrbitMode>,
}

/// The bath split into four reflection sectors.
#[derive(Debug, Clone)]
pub struct BathSectors {
    pub spec: BathSpec,
    pub axes: SymmetryAxes,
    pub sectors: [SectorModes; 4],
    /// Per site and sector: (mode index within the sector, coefficient of
    /// this site in that mode), if the orbit projects onto the sector.
    site_lookup: Vec<[Option<(u32, f64)>; 4]>,
    /// Per site: (orbit id, member index within the orbit).
    orbit_of_site: Vec<(u32, u32)>,
    /// Orbit members (site indices, sorted by coordinates), per orbit id.
    pub orbits: Vec<Vec<usize>>,
}

/// Split the bath into the four reflection-symmetry sectors.
pub fn decompose_symmetry(spec: &BathSpec, axes: SymmetryAxes) -> Result<BathSectors, BathError> {
    BathSpec::new(spec.l, spec.j)?;
    let n = spec.num_sites();

    // enumerate orbits by representative, scanning sites in coordinate order
    let mut orbit_of_site = vec![(u32::MAX, u32::MAX); n];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let h = spec.half();
    for x in -h..=h {
        for y in -h..=h {
            let idx = spec.site_index(x, y);
            if orbit_of_site[idx].0 != u32::MAX {
                continue;
            }
            let mut members: Vec<(i32, i32)> = vec![
                (x, y),
                axes.reflect1((x, y)),
                axes.reflect2((x, y)),
                axes.reflect1(axes.reflect2((x, y))),
            ];
            members.sort_unstable();
            members.dedup();
            let oid = orbits.len() as u32;
            let mut sites = Vec::with_capacity(members.len());
            for (mi, &(mx, my)) in members.iter().enumerate() {
                let midx = spec.site_index(mx, my);
                orbit_of_site[midx] = (oid, mi as u32);
                sites.push(midx);
            }
            orbits.push(sites);
        }
    }

    let mut sectors: [SectorModes; 4] = SectorLabel::ALL.map(|label| SectorModes {
        label,
        modes: Vec::new(),
    });
    let mut site_lookup = vec![[None; 4]; n];

    for orbit in &orbits {
        let rep = spec.site_coords(orbit[0]);
        // group elements acting on the representative, with their characters
        let images = [
            (rep, (1.0, 1.0)),
            (axes.reflect1(rep), (-1.0, 1.0)),
            (axes.reflect2(rep), (1.0, -1.0)),
            (axes.reflect1(axes.reflect2(rep)), (-1.0, -1.0)),
        ];
        for label in SectorLabel::ALL {
            let chi1 = if label.s1 { 1.0 } else { -1.0 };
            let chi2 = if label.s2 { 1.0 } else { -1.0 };
            let mut coeffs: Vec<f64> = vec![0.0; orbit.len()];
            for (img, (f1, f2)) in images {
                let sidx = spec.site_index(img.0, img.1);
                let pos = orbit.iter().position(|&s| s == sidx).unwrap();
                let chi = (if f1 < 0.0 { chi1 } else { 1.0 }) * (if f2 < 0.0 { chi2 } else { 1.0 });
                coeffs[pos] += chi / 4.0;
            }
            let norm: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < 1e-14 {
                continue;
            }
            let members: Vec<(usize, f64)> = orbit
                .iter()
                .zip(&coeffs)
                .filter(|(_, &c)| c.abs() > 1e-14)
                .map(|(&s, &c)| (s, c / norm))
                .collect();
            let sec = &mut sectors[label.index()];
            let mode_id = sec.modes.len() as u32;
            for &(s, c) in &members {
                site_lookup[s][label.index()] = Some((mode_id, c));
            }
            sec.modes.push(OrbitMode { rep, members });
        }
    }

    Ok(BathSectors {
        spec: *spec,
        axes,
        sectors,
        site_lookup,
        orbit_of_site,
        orbits,
    })
}

impl BathSectors {
    pub fn dim(&self, label: SectorLabel) -> usize {
        self.sectors[label.index()].modes.len()
    }

    pub fn orbit_of_site(&self, site: usize) -> (usize, usize) {
        let (o, m) = self.orbit_of_site[site];
        (o as usize, m as usize)
    }

    /// Mode index and coefficient of `site` inside `label`'s basis, if the
    /// site's orbit projects onto that sector.
    pub fn mode_at_site(&self, label: SectorLabel, site: usize) -> Option<(usize, f64)> {
        self.site_lookup[site][label.index()].map(|(m, c)| (m as usize, c))
    }

    /// Dense sector Hamiltonian block in the orbit-mode basis. Materialized
    /// on demand; for large lattices hold only one block at a time.
    pub fn sector_block(&self, label: SectorLabel) -> RMat {
        let sec = &self.sectors[label.index()];
        let n = sec.modes.len();
        let mut block = RMat::zeros((n, n));
        for (alpha, mode) in sec.modes.iter().enumerate() {
            for &(site, ca) in &mode.members {
                let (x, y) = self.spec.site_coords(site);
                for (nx, ny) in self.spec.neighbours(x, y) {
                    let nidx = self.spec.site_index(nx, ny);
                    if let Some((beta, cb)) = self.site_lookup[nidx][label.index()] {
                        block[[alpha, beta as usize]] += -self.spec.j * ca * cb;
                    }
                }
            }
        }
        // clean up roundoff asymmetry from the accumulation order
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (block[[i, j]] + block[[j, i]]);
                block[[i, j]] = avg;
                block[[j, i]] = avg;
            }
        }
        block
    }

    /// Full change-of-basis matrix from sites to orbit modes, sectors in
    /// label order. Columns are the modes; only sensible for small lattices.
    pub fn orbit_basis_matrix(&self) -> RMat {
        let n = self.spec.num_sites();
        let mut u = RMat::zeros((n, n));
        let mut col = 0;
        for sec in &self.sectors {
            for mode in &sec.modes {
                for &(site, c) in &mode.members {
                    u[[site, col]] = c;
                }
                col += 1;
            }
        }
        debug_assert_eq!(col, n);
        u
    }
}

/// Result of projecting a sector onto the eigenmodes inside an energy window
/// around omega0. The kept sector Hamiltonian is diagonal in this basis.
#[derive(Debug, Clone)]
pub struct EnergyWindow {
    pub omega0: f64,
    pub half_width: f64,
    /// Energies of the kept eigenmodes, ascending.
    pub kept_energies: Array1<f64>,
    /// Coupling vectors rewritten in the kept eigenbasis, (kept, n_ops).
    pub kept_couplings: RMat,
    pub discarded_energies: Array1<f64>,
    pub discarded_couplings: RMat,
    /// Per operator: squared norm lost to the discarded modes.
    pub norm_loss: Vec<f64>,
}

/// Keep only eigenmodes of `block` with |e - omega0| <= half_width and
/// project the given coupling columns onto them.
pub fn truncate_energy(
    block: &RMat,
    couplings: &RMat,
    omega0: f64,
    half_width: f64,
) -> Result<EnergyWindow, BathError> {
    if !(half_width > 0.0) {
        return Err(BathError::BadWindow(half_width));
    }
    let eig = sym_eig(block)?;
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&q| (eig.eigenvalues[q] - omega0).abs() <= half_width)
        .collect();
    if kept.is_empty() {
        let nearest = eig
            .eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| {
                (a - omega0).abs().partial_cmp(&(b - omega0).abs()).unwrap()
            })
            .unwrap();
        return Err(BathError::EmptyWindow { omega0, half_width, nearest });
    }
    let discarded: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|q| !kept.contains(q))
        .collect();

    let project = |rows: &[usize]| -> (Array1<f64>, RMat) {
        let energies = Array1::from_iter(rows.iter().map(|&q| eig.eigenvalues[q]));
        let mut proj = RMat::zeros((rows.len(), couplings.ncols()));
        for (i, &q) in rows.iter().enumerate() {
            for op in 0..couplings.ncols() {
                // v_q^T g_op
                let mut acc = 0.0;
                for s in 0..couplings.nrows() {
                    acc += eig.eigenvectors[[s, q]] * couplings[[s, op]];
                }
                proj[[i, op]] = acc;
            }
        }
        (energies, proj)
    };
    let (kept_energies, kept_couplings) = project(&kept);
    let (discarded_energies, discarded_couplings) = project(&discarded);
    let norm_loss: Vec<f64> = (0..couplings.ncols())
        .map(|op| discarded_couplings.column(op).iter().map(|g| g * g).sum())
        .collect();

    Ok(EnergyWindow {
        omega0,
        half_width,
        kept_energies,
        kept_couplings,
        discarded_energies,
        discarded_couplings,
        norm_loss,
    })
}

/// Lamb shift from the discarded far-detuned modes: sum |g_n|^2/(omega0 - e_n).
/// Diagnostic only; not fed back into the dynamics.
pub fn lamb_shift(
    discarded_energies: &Array1<f64>,
    discarded_couplings: &Array1<f64>,
    omega0: f64,
) -> Result<f64, BathError> {
    let mut shift = 0.0;
    for (&e, &g) in discarded_energies.iter().zip(discarded_couplings.iter()) {
        let det = omega0 - e;
        if det.abs() < 1e-12 {
            return Err(BathError::LambShiftDivergence { energy: e, omega0 });
        }
        shift += g * g / det;
    }
    Ok(shift)
}
