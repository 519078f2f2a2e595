//! Dense joint and conditional probability tables.
//!
//! Tables are stored row-major: the last variable varies fastest.

use crate::error::{Error, Result};

/// Tolerance on the total mass of a joint table and on each row of a
/// conditional table.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Largest number of cells any table may hold.
pub const MAX_ENTRIES: usize = 10_000_000;

/// Number of cells of a table with the given alphabet sizes.
pub fn table_len(sizes: &[usize]) -> Result<usize> {
    let mut total: u128 = 1;
    for (i, &s) in sizes.iter().enumerate() {
        if s == 0 {
            return Err(Error::invalid(format!("variable {i} has an empty alphabet")));
        }
        total = total.saturating_mul(s as u128);
    }
    if total > MAX_ENTRIES as u128 {
        return Err(Error::TooLarge {
            entries: total,
            limit: MAX_ENTRIES as u128,
        });
    }
    Ok(total as usize)
}

/// Row-major strides for the given sizes.
pub fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![1; sizes.len()];
    for k in (0..sizes.len().saturating_sub(1)).rev() {
        out[k] = out[k + 1] * sizes[k + 1];
    }
    out
}

/// Advance `idx` to the next tuple in row-major order. Returns false after
/// the last tuple, leaving `idx` at all zeros.
pub fn next_tuple(idx: &mut [usize], sizes: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < sizes[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

fn flat_index(idx: &[usize], sizes: &[usize]) -> usize {
    idx.iter()
        .zip(sizes)
        .fold(0, |acc, (&i, &s)| acc * s + i)
}

fn check_probs(probs: &[f64]) -> Result<()> {
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::BadProbability { index, value });
        }
    }
    Ok(())
}

/// Joint probability mass function over a tuple of finite alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    /// Build from a dense row-major table. The entries must be nonnegative and
    /// sum to one within [`NORMALIZATION_TOL`].
    pub fn new(sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::invalid("a joint pmf needs at least one variable"));
        }
        let len = table_len(&sizes)?;
        if probs.len() != len {
            return Err(Error::invalid(format!(
                "table has {} entries but the alphabet sizes require {len}",
                probs.len()
            )));
        }
        check_probs(&probs)?;
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized {
                sum,
                tol: NORMALIZATION_TOL,
            });
        }
        Ok(JointPmf { sizes, probs })
    }

    /// Build from nonnegative weights, dividing by their total.
    pub fn from_weights(sizes: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        let len = table_len(&sizes)?;
        if weights.len() != len {
            return Err(Error::invalid(format!(
                "table has {} entries but the alphabet sizes require {len}",
                weights.len()
            )));
        }
        check_probs(&weights)?;
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("weights have zero total mass"));
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        Self::new(sizes, probs)
    }

    /// Build by evaluating `f` on every tuple.
    pub fn from_fn(sizes: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = table_len(&sizes)?;
        let mut probs = Vec::with_capacity(len);
        let mut idx = vec![0; sizes.len()];
        loop {
            probs.push(f(&idx));
            if !next_tuple(&mut idx, &sizes) {
                break;
            }
        }
        Self::new(sizes, probs)
    }

    pub fn uniform(sizes: Vec<usize>) -> Result<Self> {
        let len = table_len(&sizes)?;
        Self::new(sizes, vec![1.0 / len as f64; len])
    }

    pub fn point_mass(sizes: Vec<usize>, at: &[usize]) -> Result<Self> {
        let len = table_len(&sizes)?;
        if at.len() != sizes.len() || at.iter().zip(&sizes).any(|(&a, &s)| a >= s) {
            return Err(Error::invalid("point mass location is outside the alphabets"));
        }
        let mut probs = vec![0.0; len];
        probs[flat_index(at, &sizes)] = 1.0;
        Self::new(sizes, probs)
    }

    /// Internal constructor for tables produced by mass-preserving operations.
    fn from_parts(sizes: Vec<usize>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), sizes.iter().product::<usize>());
        JointPmf { sizes, probs }
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.sizes.len(), "tuple has the wrong arity");
        self.probs[flat_index(idx, &self.sizes)]
    }

    /// Visit every tuple with its probability.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], f64)) {
        let mut idx = vec![0; self.sizes.len()];
        for &p in &self.probs {
            f(&idx, p);
            next_tuple(&mut idx, &self.sizes);
        }
    }

    /// Expectation of `f` under this pmf.
    pub fn expectation(&self, mut f: impl FnMut(&[usize]) -> f64) -> f64 {
        let mut acc = 0.0;
        self.for_each(|idx, p| {
            if p > 0.0 {
                acc += p * f(idx);
            }
        });
        acc
    }

    pub(crate) fn check_vars(&self, vars: &[usize]) -> Result<()> {
        for (k, &v) in vars.iter().enumerate() {
            if v >= self.arity() {
                return Err(Error::invalid(format!(
                    "variable index {v} out of range for a pmf of arity {}",
                    self.arity()
                )));
            }
            if vars[..k].contains(&v) {
                return Err(Error::invalid(format!("variable index {v} listed twice")));
            }
        }
        Ok(())
    }

    /// Marginal over `vars`, in the order given. An empty list yields the
    /// trivial pmf with a single cell of mass one.
    pub fn marginal(&self, vars: &[usize]) -> Result<JointPmf> {
        self.check_vars(vars)?;
        if vars.is_empty() {
            return Ok(JointPmf::from_parts(vec![1], vec![self.probs.iter().sum()]));
        }
        let sizes: Vec<usize> = vars.iter().map(|&v| self.sizes[v]).collect();
        let out_strides = strides(&sizes);
        let mut map = vec![0usize; self.arity()];
        for (k, &v) in vars.iter().enumerate() {
            map[v] = out_strides[k];
        }
        let mut out = vec![0.0; sizes.iter().product()];
        let mut idx = vec![0; self.arity()];
        for &p in &self.probs {
            let target: usize = idx.iter().zip(&map).map(|(&i, &s)| i * s).sum();
            out[target] += p;
            next_tuple(&mut idx, &self.sizes);
        }
        Ok(JointPmf::from_parts(sizes, out))
    }

    /// Append a variable drawn from `channel` given the variables `parents`.
    pub fn extend(&self, parents: &[usize], channel: &CondPmf) -> Result<JointPmf> {
        self.check_vars(parents)?;
        let parent_sizes: Vec<usize> = parents.iter().map(|&v| self.sizes[v]).collect();
        if parent_sizes != channel.input_sizes {
            return Err(Error::invalid(format!(
                "channel expects inputs {:?} but parents have sizes {parent_sizes:?}",
                channel.input_sizes
            )));
        }
        let m = channel.output_size;
        let mut sizes = self.sizes.clone();
        sizes.push(m);
        table_len(&sizes)?;
        let pstrides = strides(&parent_sizes);
        let mut out = Vec::with_capacity(self.probs.len() * m);
        let mut idx = vec![0; self.arity()];
        for &p in &self.probs {
            let row: usize = parents.iter().zip(&pstrides).map(|(&v, &s)| idx[v] * s).sum();
            out.extend(channel.row_at(row).iter().map(|&q| p * q));
            next_tuple(&mut idx, &self.sizes);
        }
        Ok(JointPmf::from_parts(sizes, out))
    }

    /// Append a variable that is a deterministic function of `parents`.
    pub fn extend_map(&self, parents: &[usize], map: &DeterministicMap) -> Result<JointPmf> {
        self.check_vars(parents)?;
        let parent_sizes: Vec<usize> = parents.iter().map(|&v| self.sizes[v]).collect();
        if parent_sizes != map.input_sizes {
            return Err(Error::invalid(format!(
                "map expects inputs {:?} but parents have sizes {parent_sizes:?}",
                map.input_sizes
            )));
        }
        let m = map.output_size;
        let mut sizes = self.sizes.clone();
        sizes.push(m);
        table_len(&sizes)?;
        let pstrides = strides(&parent_sizes);
        let mut out = vec![0.0; self.probs.len() * m];
        let mut idx = vec![0; self.arity()];
        for (cell, &p) in self.probs.iter().enumerate() {
            let row: usize = parents.iter().zip(&pstrides).map(|(&v, &s)| idx[v] * s).sum();
            out[cell * m + map.table[row]] = p;
            next_tuple(&mut idx, &self.sizes);
        }
        Ok(JointPmf::from_parts(sizes, out))
    }

    /// Joint of two independent pmfs: the variables of `self` followed by
    /// those of `other`.
    pub fn product(&self, other: &JointPmf) -> Result<JointPmf> {
        let mut sizes = self.sizes.clone();
        sizes.extend_from_slice(&other.sizes);
        table_len(&sizes)?;
        let mut out = Vec::with_capacity(self.len() * other.len());
        for &p in &self.probs {
            out.extend(other.probs.iter().map(|&q| p * q));
        }
        Ok(JointPmf::from_parts(sizes, out))
    }
}

/// Conditional pmf `p(out | inputs)`, one normalised row per input tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct CondPmf {
    input_sizes: Vec<usize>,
    output_size: usize,
    table: Vec<f64>,
}

impl CondPmf {
    /// Build from a dense table laid out as inputs (row-major) then output.
    pub fn new(input_sizes: Vec<usize>, output_size: usize, table: Vec<f64>) -> Result<Self> {
        let rows = table_len(&input_sizes)?;
        if output_size == 0 {
            return Err(Error::invalid("output alphabet is empty"));
        }
        let mut all = input_sizes.clone();
        all.push(output_size);
        let len = table_len(&all)?;
        if table.len() != len {
            return Err(Error::invalid(format!(
                "conditional table has {} entries, expected {len}",
                table.len()
            )));
        }
        check_probs(&table)?;
        for r in 0..rows {
            let sum: f64 = table[r * output_size..(r + 1) * output_size].iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::NotNormalized {
                    sum,
                    tol: NORMALIZATION_TOL,
                });
            }
        }
        Ok(CondPmf {
            input_sizes,
            output_size,
            table,
        })
    }

    pub fn from_rows(input_sizes: Vec<usize>, output_size: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let table = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(input_sizes, output_size, table)
    }

    pub fn from_fn(
        input_sizes: Vec<usize>,
        output_size: usize,
        mut f: impl FnMut(&[usize], usize) -> f64,
    ) -> Result<Self> {
        let rows = table_len(&input_sizes)?;
        let mut table = Vec::with_capacity(rows * output_size);
        let mut idx = vec![0; input_sizes.len()];
        for _ in 0..rows {
            for o in 0..output_size {
                table.push(f(&idx, o));
            }
            next_tuple(&mut idx, &input_sizes);
        }
        Self::new(input_sizes, output_size, table)
    }

    /// Every row equal to `dist`.
    pub fn constant(input_sizes: Vec<usize>, dist: &[f64]) -> Result<Self> {
        let rows = table_len(&input_sizes)?;
        let table = (0..rows).flat_map(|_| dist.iter().copied()).collect();
        Self::new(input_sizes, dist.len(), table)
    }

    pub fn from_map(map: &DeterministicMap) -> Self {
        let mut table = vec![0.0; map.table.len() * map.output_size];
        for (r, &o) in map.table.iter().enumerate() {
            table[r * map.output_size + o] = 1.0;
        }
        CondPmf {
            input_sizes: map.input_sizes.clone(),
            output_size: map.output_size,
            table,
        }
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn num_rows(&self) -> usize {
        self.table.len() / self.output_size
    }

    pub fn row_at(&self, r: usize) -> &[f64] {
        &self.table[r * self.output_size..(r + 1) * self.output_size]
    }

    pub fn row(&self, input: &[usize]) -> &[f64] {
        self.row_at(flat_index(input, &self.input_sizes))
    }

    pub fn prob(&self, input: &[usize], out: usize) -> f64 {
        self.row(input)[out]
    }
}

/// Deterministic map from a tuple of finite alphabets to a finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicMap {
    input_sizes: Vec<usize>,
    output_size: usize,
    table: Vec<usize>,
}

impl DeterministicMap {
    pub fn new(input_sizes: Vec<usize>, output_size: usize, table: Vec<usize>) -> Result<Self> {
        let rows = table_len(&input_sizes)?;
        if output_size == 0 {
            return Err(Error::invalid("output alphabet is empty"));
        }
        if table.len() != rows {
            return Err(Error::invalid(format!(
                "map has {} entries, expected {rows}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&o| o >= output_size) {
            return Err(Error::invalid(format!(
                "map output {bad} outside alphabet of size {output_size}"
            )));
        }
        Ok(DeterministicMap {
            input_sizes,
            output_size,
            table,
        })
    }

    pub fn from_fn(
        input_sizes: Vec<usize>,
        output_size: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Result<Self> {
        let rows = table_len(&input_sizes)?;
        let mut table = Vec::with_capacity(rows);
        let mut idx = vec![0; input_sizes.len()];
        for _ in 0..rows {
            table.push(f(&idx));
            next_tuple(&mut idx, &input_sizes);
        }
        Self::new(input_sizes, output_size, table)
    }

    pub fn constant(input_sizes: Vec<usize>, output_size: usize, value: usize) -> Result<Self> {
        let rows = table_len(&input_sizes)?;
        Self::new(input_sizes, output_size, vec![value; rows])
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, input: &[usize]) -> usize {
        self.table[flat_index(input, &self.input_sizes)]
    }
}
