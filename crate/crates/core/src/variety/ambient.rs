//! Ambient matrix groups and their defining ideals.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::matrix::{RatMatrix, Rational};
use crate::poly::{vars, Ideal, Polynomial, Vars};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AmbientGroup {
    /// `SL(n)`.
    SpecialLinear(usize),
    /// `SL(n) ⋉ R^n` embedded as `[[A, X], [0, 1]]`.
    AffineSpecialLinear(usize),
    /// Block-diagonal pairs `[[g, 0], [0, h]]` of the inner group.
    Product(Box<AmbientGroup>),
}

/// What sits at a matrix position of the ambient's symbolic matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Var(usize),
    Zero,
    One,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmbientDescription {
    pub kind: String,
    pub n: usize,
}

impl AmbientGroup {
    pub fn n(&self) -> usize {
        match self {
            AmbientGroup::SpecialLinear(n) | AmbientGroup::AffineSpecialLinear(n) => *n,
            AmbientGroup::Product(inner) => inner.n(),
        }
    }

    pub fn matrix_size(&self) -> usize {
        match self {
            AmbientGroup::SpecialLinear(n) => *n,
            AmbientGroup::AffineSpecialLinear(n) => n + 1,
            AmbientGroup::Product(inner) => 2 * inner.matrix_size(),
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            AmbientGroup::SpecialLinear(_) => "sl".into(),
            AmbientGroup::AffineSpecialLinear(_) => "affine-sl".into(),
            AmbientGroup::Product(inner) => format!("product-{}", inner.kind_name()),
        }
    }

    pub fn describe(&self) -> AmbientDescription {
        AmbientDescription { kind: self.kind_name(), n: self.n() }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, AmbientGroup::AffineSpecialLinear(_))
    }

    /// Basic (non-product) blocks with their offsets along the diagonal.
    pub fn blocks(&self) -> Vec<(usize, AmbientGroup)> {
        match self {
            AmbientGroup::Product(inner) => {
                let s = inner.matrix_size();
                let mut out = inner.blocks();
                out.extend(inner.blocks().into_iter().map(|(o, b)| (o + s, b)));
                out
            }
            other => vec![(0, other.clone())],
        }
    }

    /// Layout of the symbolic matrix and the variable names it uses.
    pub fn layout(&self) -> (Vec<Vec<Entry>>, Vars) {
        let size = self.matrix_size();
        let mut grid = vec![vec![Entry::Zero; size]; size];
        let mut names: Vec<String> = Vec::new();
        let top_level_affine = self.is_affine();
        for (off, block) in self.blocks() {
            let n = block.n();
            for i in 0..n {
                for j in 0..n {
                    grid[off + i][off + j] = Entry::Var(names.len());
                    names.push(format!("x_{}_{}", off + i + 1, off + j + 1));
                }
            }
            if block.is_affine() {
                for i in 0..n {
                    grid[off + i][off + n] = Entry::Var(names.len());
                    names.push(if top_level_affine {
                        format!("t_{}", i + 1)
                    } else {
                        format!("x_{}_{}", off + i + 1, off + n + 1)
                    });
                }
                grid[off + n][off + n] = Entry::One;
            }
        }
        (grid, vars(&names))
    }

    pub fn variables(&self) -> Vars {
        self.layout().1
    }

    pub fn symbolic_matrix(&self) -> Vec<Vec<Polynomial>> {
        let (grid, v) = self.layout();
        grid.iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        Entry::Var(k) => Polynomial::var(v.clone(), *k),
                        Entry::Zero => Polynomial::zero(v.clone()),
                        Entry::One => Polynomial::one(v.clone()),
                    })
                    .collect()
            })
            .collect()
    }

    /// `det − 1` of the linear part of every block.
    pub fn defining_ideal(&self) -> Ideal {
        let v = self.variables();
        let sym = self.symbolic_matrix();
        let gens = self
            .blocks()
            .iter()
            .map(|(off, b)| {
                let n = b.n();
                let block: Vec<Vec<Polynomial>> =
                    (0..n).map(|i| (0..n).map(|j| sym[off + i][off + j].clone()).collect()).collect();
                symbolic_det(&block, &v).sub(&Polynomial::one(v.clone()))
            })
            .collect();
        Ideal::new(v, gens)
    }

    /// Whether `m` has the block shape and unit block determinants.
    pub fn contains(&self, m: &RatMatrix) -> bool {
        let size = self.matrix_size();
        if m.rows() != size || m.cols() != size {
            return false;
        }
        let (grid, _) = self.layout();
        for i in 0..size {
            for j in 0..size {
                let ok = match grid[i][j] {
                    Entry::Var(_) => true,
                    Entry::Zero => m[(i, j)].is_zero(),
                    Entry::One => m[(i, j)].is_one(),
                };
                if !ok {
                    return false;
                }
            }
        }
        self.blocks().iter().all(|(off, b)| m.submatrix(*off, *off, b.n(), b.n()).det().is_one())
    }

    /// Coordinates of `m` in the ambient's variables.
    pub fn point_of(&self, m: &RatMatrix) -> Vec<Rational> {
        let (grid, v) = self.layout();
        let mut out = vec![Rational::zero(); v.len()];
        for (i, row) in grid.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if let Entry::Var(k) = e {
                    out[*k] = m[(i, j)].clone();
                }
            }
        }
        out
    }

    /// Matrix with the given variable values.
    pub fn matrix_of(&self, point: &[Rational]) -> RatMatrix {
        let (grid, _) = self.layout();
        let size = grid.len();
        let mut m = RatMatrix::zeros(size, size);
        for (i, row) in grid.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = match e {
                    Entry::Var(k) => point[*k].clone(),
                    Entry::Zero => Rational::zero(),
                    Entry::One => Rational::one(),
                };
            }
        }
        m
    }
}

impl fmt::Display for AmbientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbientGroup::SpecialLinear(n) => write!(f, "SL({n})"),
            AmbientGroup::AffineSpecialLinear(n) => write!(f, "SL({n})⋉R^{n}"),
            AmbientGroup::Product(inner) => write!(f, "{inner}×{inner}"),
        }
    }
}

impl AmbientGroup {
    /// Parses a kind tag such as `sl`, `affine-sl`, `product-sl`.
    pub fn from_kind(kind: &str, n: usize) -> Option<Self> {
        if n == 0 {
            return None;
        }
        let k = kind.trim().to_ascii_lowercase().replace('_', "-");
        if let Some(rest) = k.strip_prefix("product-") {
            return Self::from_kind(rest, n).map(|g| AmbientGroup::Product(Box::new(g)));
        }
        match k.as_str() {
            "sl" | "special-linear" => Some(AmbientGroup::SpecialLinear(n)),
            "affine-sl" | "affine" | "affine-special-linear" => Some(AmbientGroup::AffineSpecialLinear(n)),
            _ => None,
        }
    }
}

/// Accepts compact tags like `sl2`, `affine-sl3`, `product-sl2`.
impl FromStr for AmbientGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let split = t.rfind(|c: char| !c.is_ascii_digit()).map_or(0, |i| i + 1);
        let (kind, digits) = t.split_at(split);
        let n: usize = digits.parse().map_err(|_| format!("missing matrix size in '{s}'"))?;
        Self::from_kind(kind, n).ok_or_else(|| format!("unknown ambient kind '{s}'"))
    }
}

/// Determinant of a square matrix of polynomials.
pub fn symbolic_det(m: &[Vec<Polynomial>], v: &Vars) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one(v.clone());
    }
    // Laplace expansion along successive rows
    fn rec(m: &[Vec<Polynomial>], cols: &[usize], row: usize, v: &Vars) -> Polynomial {
        if cols.len() == 1 {
            return m[row][cols[0]].clone();
        }
        let mut acc = Polynomial::zero(v.clone());
        for (k, &c) in cols.iter().enumerate() {
            if m[row][c].is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let minor = rec(m, &rest, row + 1, v);
            let term = m[row][c].mul(&minor);
            acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }
    let cols: Vec<usize> = (0..n).collect();
    rec(m, &cols, 0, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;

    #[test]
    fn sl2_defining_ideal() {
        let g = AmbientGroup::SpecialLinear(2);
        let i = g.defining_ideal();
        assert_eq!(i.generators()[0].to_string(), "-x_1_2*x_2_1 + x_1_1*x_2_2 - 1");
        assert!(g.contains(&RatMatrix::from_i64_rows(&[&[5, 2], &[2, 1]])));
        assert!(!g.contains(&RatMatrix::from_i64_rows(&[&[5, 2], &[2, 2]])));
    }

    #[test]
    fn affine_layout_uses_translation_names() {
        let g = AmbientGroup::AffineSpecialLinear(2);
        let v = g.variables();
        assert_eq!(v.iter().map(String::as_str).collect::<Vec<_>>(),
            ["x_1_1", "x_1_2", "x_2_1", "x_2_2", "t_1", "t_2"]);
        let m = RatMatrix::from_i64_rows(&[&[1, 1, 3], &[0, 1, -1], &[0, 0, 1]]);
        assert!(g.contains(&m));
        assert_eq!(g.matrix_of(&g.point_of(&m)), m);
        let bad = RatMatrix::from_i64_rows(&[&[1, 1, 3], &[0, 1, -1], &[1, 0, 1]]);
        assert!(!g.contains(&bad));
    }

    #[test]
    fn product_blocks() {
        let g: AmbientGroup = "product-sl2".parse().unwrap();
        assert_eq!(g.matrix_size(), 4);
        assert_eq!(g.defining_ideal().generators().len(), 2);
        let m = RatMatrix::block_diag(
            &RatMatrix::from_i64_rows(&[&[1, 2], &[0, 1]]),
            &RatMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]),
        );
        assert!(g.contains(&m));
        let p = g.point_of(&m);
        assert!(g.defining_ideal().vanishes_at(&p).unwrap());
        assert_eq!(p[0], rat(1));
    }

    #[test]
    fn parse_tags() {
        assert_eq!("sl3".parse::<AmbientGroup>().unwrap(), AmbientGroup::SpecialLinear(3));
        assert_eq!(
            "affine-sl3".parse::<AmbientGroup>().unwrap(),
            AmbientGroup::AffineSpecialLinear(3)
        );
        assert!("gl2".parse::<AmbientGroup>().is_err());
        assert!("sl".parse::<AmbientGroup>().is_err());
    }
}
