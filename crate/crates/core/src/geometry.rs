//! Rest geometry of the artery: the uniform mesh, the per-cell rest radius
//! `R0(x)` and stiffness `k(x)`, and the derived quantities the scheme
//! consumes.
//!
//! Profiles are sampled pointwise at cell centers; no cell averaging is
//! applied, so a discrete rest state is exactly representable.

use thiserror::Error;

/// Errors from grid and profile construction.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("grid needs at least one cell")]
    EmptyGrid,
    #[error("domain length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("profile breakpoints must be strictly increasing: {0:?}")]
    NonMonotoneBreakpoints(Vec<f64>),
    #[error("non-positive rest radius {radius} at x = {x}")]
    NonPositiveRadius { x: f64, radius: f64 },
    #[error("non-positive stiffness {stiffness} at x = {x}")]
    NonPositiveStiffness { x: f64, stiffness: f64 },
    #[error("elastic modulus and wall thickness must be positive (E = {e}, h = {h})")]
    NonPositiveElasticity { e: f64, h: f64 },
    #[error("profile table row {row}: x values must be strictly increasing")]
    TableUnsorted { row: usize },
    #[error("profile table covers [{x_min}, {x_max}] but the grid needs [{need_min}, {need_max}]")]
    TableOutOfRange {
        x_min: f64,
        x_max: f64,
        need_min: f64,
        need_max: f64,
    },
    #[error("profile table needs at least two rows, got {0}")]
    TableTooShort(usize),
    #[error("profile table line {line}: {reason}")]
    TableParse { line: usize, reason: String },
    #[error("per-cell array length {got} does not match grid cell count {want}")]
    LengthMismatch { got: usize, want: usize },
}

/// Uniform 1D mesh of `J` cells covering `[x_left, x_left + L]`.
///
/// Cell `i` is centered at `x_left + (i + 1/2) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    cells: usize,
    dx: f64,
    x_left: f64,
}

impl Grid {
    pub fn new(cells: usize, length: f64, x_left: f64) -> Result<Self, GeometryError> {
        if cells == 0 {
            return Err(GeometryError::EmptyGrid);
        }
        if !(length > 0.0) {
            return Err(GeometryError::NonPositiveLength(length));
        }
        Ok(Self {
            cells,
            dx: length / cells as f64,
            x_left,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Cell width [m].
    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn length(&self) -> f64 {
        self.dx * self.cells as f64
    }

    /// Center of cell `i` [m].
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.cell_center(i)).collect()
    }
}

/// Per-cell rest geometry and stiffness of the vessel.
///
/// Stores the rest radius `R0` [m], the rest area `A0 = pi R0^2` [m^2], the
/// wall stiffness `k` [Pa/m] and the combined quantity `k sqrt(A0)` [Pa]
/// whose gradient drives the geometric source term.
#[derive(Debug, Clone)]
pub struct ArteryProfile {
    grid: Grid,
    r0: Vec<f64>,
    a0: Vec<f64>,
    k: Vec<f64>,
    a0_bold: Vec<f64>,
}

impl ArteryProfile {
    /// Build a profile from per-cell radius and stiffness samples. The
    /// derived fields `A0` and `k sqrt(A0)` are computed here and nowhere
    /// else.
    pub fn from_samples(grid: Grid, r0: Vec<f64>, k: Vec<f64>) -> Result<Self, GeometryError> {
        if r0.len() != grid.cells() {
            return Err(GeometryError::LengthMismatch {
                got: r0.len(),
                want: grid.cells(),
            });
        }
        if k.len() != grid.cells() {
            return Err(GeometryError::LengthMismatch {
                got: k.len(),
                want: grid.cells(),
            });
        }
        for i in 0..grid.cells() {
            if !(r0[i] > 0.0) {
                return Err(GeometryError::NonPositiveRadius {
                    x: grid.cell_center(i),
                    radius: r0[i],
                });
            }
            if !(k[i] > 0.0) {
                return Err(GeometryError::NonPositiveStiffness {
                    x: grid.cell_center(i),
                    stiffness: k[i],
                });
            }
        }
        let a0: Vec<f64> = r0.iter().map(|r| std::f64::consts::PI * r * r).collect();
        let a0_bold: Vec<f64> = a0.iter().zip(&k).map(|(a, kk)| kk * a.sqrt()).collect();
        Ok(Self {
            grid,
            r0,
            a0,
            k,
            a0_bold,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Rest radius per cell [m].
    pub fn r0(&self) -> &[f64] {
        &self.r0
    }

    /// Rest cross-section per cell [m^2].
    pub fn a0(&self) -> &[f64] {
        &self.a0
    }

    /// Wall stiffness per cell [Pa/m].
    pub fn k(&self) -> &[f64] {
        &self.k
    }

    /// `k sqrt(A0)` per cell [Pa].
    pub fn a0_bold(&self) -> &[f64] {
        &self.a0_bold
    }
}

/// Analytic rest-geometry shapes used by the validation cases.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    /// Constant radius and stiffness.
    Uniform { r0: f64, k: f64 },
    /// Smooth bump of height `delta_r` between `x1` and `x4`, flat at
    /// `r0 + delta_r` on `[x2, x3]`, sine/cosine ramps on the sides.
    AneurysmBump {
        r0: f64,
        delta_r: f64,
        x1: f64,
        x2: f64,
        x3: f64,
        x4: f64,
        k: f64,
    },
    /// Cosine step from `r_r + delta_r` down to `r_r` between `x1` and `x2`,
    /// an idealized parent-to-daughter transition.
    Constriction {
        r_r: f64,
        delta_r: f64,
        x1: f64,
        x2: f64,
        k: f64,
    },
    /// Radius decreasing linearly with `slope` [m per m] on `[x1, x2]`,
    /// constant outside; stiffness from the elastic wall law
    /// `k = 4 E h / (3 R0^2)`.
    LinearTaper {
        r_left: f64,
        slope: f64,
        x1: f64,
        x2: f64,
        elastic_modulus: f64,
        wall_thickness: f64,
    },
}

impl ProfileSpec {
    /// Rest radius at position `x` [m].
    pub fn radius_at(&self, x: f64) -> f64 {
        use std::f64::consts::PI;
        match *self {
            ProfileSpec::Uniform { r0, .. } => r0,
            ProfileSpec::AneurysmBump {
                r0,
                delta_r,
                x1,
                x2,
                x3,
                x4,
                ..
            } => {
                if x <= x1 {
                    r0
                } else if x < x2 {
                    r0 + 0.5 * delta_r * (1.0 + (-0.5 * PI + PI * (x - x1) / (x2 - x1)).sin())
                } else if x <= x3 {
                    r0 + delta_r
                } else if x < x4 {
                    r0 + 0.5 * delta_r * (1.0 + (PI * (x - x3) / (x4 - x3)).cos())
                } else {
                    r0
                }
            }
            ProfileSpec::Constriction {
                r_r,
                delta_r,
                x1,
                x2,
                ..
            } => {
                if x <= x1 {
                    r_r + delta_r
                } else if x <= x2 {
                    r_r + 0.5 * delta_r * (1.0 + (PI * (x - x1) / (x2 - x1)).cos())
                } else {
                    r_r
                }
            }
            ProfileSpec::LinearTaper {
                r_left,
                slope,
                x1,
                x2,
                ..
            } => {
                if x < x1 {
                    r_left
                } else if x < x2 {
                    r_left - (x - x1) * slope
                } else {
                    r_left - (x2 - x1) * slope
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            ProfileSpec::Uniform { .. } => vec![],
            ProfileSpec::AneurysmBump { x1, x2, x3, x4, .. } => vec![x1, x2, x3, x4],
            ProfileSpec::Constriction { x1, x2, .. } => vec![x1, x2],
            ProfileSpec::LinearTaper { x1, x2, .. } => vec![x1, x2],
        }
    }
}

/// Sample a profile at the cell centers of `grid`.
pub fn build_profile(spec: &ProfileSpec, grid: &Grid) -> Result<ArteryProfile, GeometryError> {
    let breaks = spec.breakpoints();
    if breaks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GeometryError::NonMonotoneBreakpoints(breaks));
    }
    let r0: Vec<f64> = grid
        .cell_centers()
        .iter()
        .map(|&x| spec.radius_at(x))
        .collect();
    let k = match *spec {
        ProfileSpec::Uniform { k, .. }
        | ProfileSpec::AneurysmBump { k, .. }
        | ProfileSpec::Constriction { k, .. } => {
            if !(k > 0.0) {
                return Err(GeometryError::NonPositiveStiffness {
                    x: grid.x_left(),
                    stiffness: k,
                });
            }
            vec![k; grid.cells()]
        }
        ProfileSpec::LinearTaper {
            elastic_modulus,
            wall_thickness,
            ..
        } => {
            for (i, &r) in r0.iter().enumerate() {
                if !(r > 0.0) {
                    return Err(GeometryError::NonPositiveRadius {
                        x: grid.cell_center(i),
                        radius: r,
                    });
                }
            }
            stiffness_from_elasticity(elastic_modulus, wall_thickness, &r0)?
        }
    };
    ArteryProfile::from_samples(grid.clone(), r0, k)
}

/// Wall stiffness from the elastic tube law, `k = 4 E h / (3 R0^2)`, with
/// `E` the Young's modulus [Pa] and `h` the wall thickness [m].
pub fn stiffness_from_elasticity(e: f64, h: f64, r0: &[f64]) -> Result<Vec<f64>, GeometryError> {
    if !(e > 0.0) || !(h > 0.0) {
        return Err(GeometryError::NonPositiveElasticity { e, h });
    }
    r0.iter()
        .map(|&r| {
            if r > 0.0 {
                Ok(4.0 / 3.0 * e * h / (r * r))
            } else {
                Err(GeometryError::NonPositiveRadius {
                    x: f64::NAN,
                    radius: r,
                })
            }
        })
        .collect()
}

/// Build a profile by linear interpolation of a tabulated `(x, R0, k)`
/// sequence onto the cell centers. The table must be strictly increasing in
/// `x` and must cover the whole grid.
pub fn load_profile(
    table: &[(f64, f64, f64)],
    grid: &Grid,
) -> Result<ArteryProfile, GeometryError> {
    if table.len() < 2 {
        return Err(GeometryError::TableTooShort(table.len()));
    }
    for (row, w) in table.windows(2).enumerate() {
        if w[0].0 >= w[1].0 {
            return Err(GeometryError::TableUnsorted { row: row + 1 });
        }
    }
    let (x_min, x_max) = (table[0].0, table[table.len() - 1].0);
    let need_min = grid.cell_center(0);
    let need_max = grid.cell_center(grid.cells() - 1);
    if x_min > need_min || x_max < need_max {
        return Err(GeometryError::TableOutOfRange {
            x_min,
            x_max,
            need_min,
            need_max,
        });
    }
    for &(x, r, k) in table {
        if !(r > 0.0) {
            return Err(GeometryError::NonPositiveRadius { x, radius: r });
        }
        if !(k > 0.0) {
            return Err(GeometryError::NonPositiveStiffness { x, stiffness: k });
        }
    }
    let mut r0 = Vec::with_capacity(grid.cells());
    let mut k = Vec::with_capacity(grid.cells());
    let mut seg = 0usize;
    for i in 0..grid.cells() {
        let x = grid.cell_center(i);
        while seg + 2 < table.len() && table[seg + 1].0 < x {
            seg += 1;
        }
        let (x0, r_a, k_a) = table[seg];
        let (x1, r_b, k_b) = table[seg + 1];
        let w = (x - x0) / (x1 - x0);
        r0.push(r_a + w * (r_b - r_a));
        k.push(k_a + w * (k_b - k_a));
    }
    ArteryProfile::from_samples(grid.clone(), r0, k)
}

/// Parse a plain-text profile table: one header line `x r0 k`, then
/// whitespace-separated columns in SI units. Lines starting with `#` and
/// blank lines are ignored.
pub fn parse_profile_table(text: &str) -> Result<Vec<(f64, f64, f64)>, GeometryError> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols != ["x", "r0", "k"] {
                return Err(GeometryError::TableParse {
                    line: idx + 1,
                    reason: format!("expected header `x r0 k`, got `{line}`"),
                });
            }
            saw_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(GeometryError::TableParse {
                line: idx + 1,
                reason: format!("expected 3 columns, got {}", cols.len()),
            });
        }
        let mut vals = [0.0f64; 3];
        for (j, c) in cols.iter().enumerate() {
            vals[j] = c.parse().map_err(|_| GeometryError::TableParse {
                line: idx + 1,
                reason: format!("cannot parse `{c}` as a number"),
            })?;
        }
        rows.push((vals[0], vals[1], vals[2]));
    }
    if !saw_header {
        return Err(GeometryError::TableParse {
            line: 0,
            reason: "missing header line `x r0 k`".into(),
        });
    }
    Ok(rows)
}
