//! Alpha compositing of greyscale layers and the reduction from subset sum to
//! single-pixel polygon compositing.
//!
//! With every layer at 50% opacity, the k-th layer chosen for a pixel is
//! drawn with greyscale `2^k * v` so that its contribution after compositing
//! is exactly `v`. Picking polygons therefore picks a subset whose sum is the
//! rendered pixel value.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest set the exhaustive subset-sum oracle accepts.
pub const MAX_ORACLE_ITEMS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub grey: f64,
    pub alpha: f64,
}

/// Layers in drawing order over a solid black background.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CompositeStack {
    pub layers: Vec<Layer>,
}

impl CompositeStack {
    pub fn uniform_alpha(greys: &[f64], alpha: f64) -> Self {
        Self {
            layers: greys.iter().map(|&grey| Layer { grey, alpha }).collect(),
        }
    }
}

/// Blends every layer over the accumulated colour, starting from black.
/// No intermediate rounding.
pub fn composite(stack: &CompositeStack) -> f64 {
    stack
        .layers
        .iter()
        .fold(0.0, |below, l| l.alpha * l.grey + (1.0 - l.alpha) * below)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSumInstance {
    pub values: Vec<u64>,
    pub target: u64,
}

impl SubsetSumInstance {
    pub fn new(values: Vec<u64>, target: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("subset sum needs at least one value"));
        }
        if values.contains(&0) || target == 0 {
            return Err(invalid("subset sum values and target must be positive"));
        }
        Ok(Self { values, target })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpfpInstance {
    /// `polygon_table[i][k - 1] = values[i] * 2^k` for `k` in `1..=m`.
    pub polygon_table: Vec<Vec<u64>>,
    pub target_pixel: u64,
}

impl SpfpInstance {
    pub fn polygon_count(&self) -> usize {
        self.polygon_table.len()
    }
}

/// Builds one polygon per value; polygon `i` may take greyscale
/// `values[i] * 2^k` when it is the k-th one selected. Fails only if a
/// table entry overflows 64 bits.
pub fn reduce(ss: &SubsetSumInstance) -> Result<SpfpInstance> {
    let m = ss.values.len() as u32;
    let polygon_table = ss
        .values
        .iter()
        .map(|&v| {
            (1..=m)
                .map(|k| {
                    2u64.checked_pow(k)
                        .and_then(|p| v.checked_mul(p))
                        .ok_or_else(|| invalid(format!("greyscale {v} * 2^{k} overflows")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(SpfpInstance {
        polygon_table,
        target_pixel: ss.target,
    })
}

fn check_selection(inst: &SpfpInstance, selection: &[usize]) -> Result<()> {
    let m = inst.polygon_count();
    let mut seen = vec![false; m];
    for &i in selection {
        if i >= m {
            return Err(invalid(format!(
                "polygon index {i} out of range for {m} polygons"
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(invalid(format!("polygon {i} selected twice")));
        }
    }
    Ok(())
}

/// Pixel value produced by drawing the selected polygons in the given order,
/// the k-th selected one at its k-th admissible greyscale: the sum over k of
/// `table[sel_k][k] / 2^k`.
pub fn evaluate_selection(inst: &SpfpInstance, selection: &[usize]) -> Result<f64> {
    check_selection(inst, selection)?;
    Ok(selection
        .iter()
        .enumerate()
        .map(|(j, &i)| {
            let k = j as i32 + 1;
            inst.polygon_table[i][j] as f64 * 0.5f64.powi(k)
        })
        .sum())
}

/// Recovers the subset: each selected polygon's base greyscale halved.
pub fn lift(selection: &[usize], inst: &SpfpInstance) -> Result<Vec<u64>> {
    check_selection(inst, selection)?;
    Ok(selection
        .iter()
        .map(|&i| inst.polygon_table[i][0] / 2)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSumSolution {
    /// Indices into the instance values, ascending.
    pub indices: Vec<usize>,
    pub subset: Vec<u64>,
    pub best_sum: u64,
    pub exact: bool,
}

/// Exhaustive search over all `2^m` subsets for the sum closest to the
/// target. Ties go to the smaller sum, then to the lexicographically smaller
/// index list.
pub fn brute_force_subset_sum(ss: &SubsetSumInstance) -> Result<SubsetSumSolution> {
    let m = ss.values.len();
    if m > MAX_ORACLE_ITEMS {
        return Err(invalid(format!(
            "subset-sum oracle supports at most {MAX_ORACLE_ITEMS} values, got {m}"
        )));
    }
    let t = ss.target;
    let mut best: Option<(u64, u64, Vec<usize>)> = None;
    for mask in 0u32..(1 << m) {
        let indices: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let sum: u64 = indices.iter().map(|&i| ss.values[i]).sum();
        let key = (sum.abs_diff(t), sum);
        let better = match &best {
            None => true,
            Some((d, s, idx)) => key < (*d, *s) || (key == (*d, *s) && indices < *idx),
        };
        if better {
            best = Some((key.0, sum, indices));
        }
    }
    let (_, best_sum, indices) = best.expect("at least the empty subset");
    Ok(SubsetSumSolution {
        subset: indices.iter().map(|&i| ss.values[i]).collect(),
        indices,
        best_sum,
        exact: best_sum == t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_values(target: u64) -> SubsetSumInstance {
        SubsetSumInstance::new(vec![13, 17, 21, 23], target).unwrap()
    }

    #[test]
    fn composite_examples() {
        assert_eq!(composite(&CompositeStack::default()), 0.0);
        assert_eq!(
            composite(&CompositeStack::uniform_alpha(&[192.0], 0.5)),
            96.0
        );
        assert_eq!(
            composite(&CompositeStack::uniform_alpha(&[192.0, 40.0, 104.0], 0.5)),
            86.0
        );
        assert_eq!(
            composite(&CompositeStack::uniform_alpha(&[192.0, 40.0, 104.0], 1.0)),
            104.0
        );
    }

    #[test]
    fn half_alpha_weights() {
        // Unit impulse in layer i exposes its coefficient.
        let n = 6;
        let mut total = 0.0;
        for i in 0..n {
            let mut greys = vec![0.0; n];
            greys[i] = 1.0;
            let c = composite(&CompositeStack::uniform_alpha(&greys, 0.5));
            let k = n - 1 - i;
            assert_eq!(c, 0.5f64.powi(k as i32 + 1));
            total += c;
        }
        assert_eq!(total + 0.5f64.powi(n as i32), 1.0);
    }

    #[test]
    fn reduce_reproduces_table() {
        let inst = reduce(&four_values(41)).unwrap();
        assert_eq!(
            inst.polygon_table,
            vec![
                vec![26, 52, 104, 208],
                vec![34, 68, 136, 272],
                vec![42, 84, 168, 336],
                vec![46, 92, 184, 368],
            ]
        );
        assert_eq!(inst.target_pixel, 41);
        let single = reduce(&SubsetSumInstance::new(vec![1], 1).unwrap()).unwrap();
        assert_eq!(single.polygon_table, vec![vec![2]]);
        assert_eq!(single.target_pixel, 1);
    }

    #[test]
    fn selection_value_and_lift() {
        let inst = reduce(&four_values(41)).unwrap();
        assert_eq!(evaluate_selection(&inst, &[1, 3]).unwrap(), 40.0);
        assert_eq!(evaluate_selection(&inst, &[3, 1]).unwrap(), 40.0);
        assert_eq!(evaluate_selection(&inst, &[]).unwrap(), 0.0);
        assert_eq!(lift(&[1, 3], &inst).unwrap(), vec![17, 23]);
        assert_eq!(lift(&[], &inst).unwrap(), Vec::<u64>::new());
        assert_eq!(lift(&[0, 1, 2, 3], &inst).unwrap().iter().sum::<u64>(), 74);
        assert!(evaluate_selection(&inst, &[1, 1]).is_err());
        assert!(evaluate_selection(&inst, &[4]).is_err());
    }

    #[test]
    fn oracle_examples() {
        let s = brute_force_subset_sum(&four_values(41)).unwrap();
        assert_eq!(
            (s.subset.clone(), s.best_sum, s.exact),
            (vec![17, 23], 40, false)
        );
        let s = brute_force_subset_sum(&four_values(30)).unwrap();
        assert_eq!((s.subset.clone(), s.exact), (vec![13, 17], true));
        let s = brute_force_subset_sum(&SubsetSumInstance::new(vec![5], 5).unwrap()).unwrap();
        assert_eq!((s.subset, s.exact), (vec![5], true));
        let too_big = SubsetSumInstance::new(vec![1; 25], 3).unwrap();
        assert!(brute_force_subset_sum(&too_big).is_err());
    }

    #[test]
    fn oracle_tie_breaks() {
        // 10 and 14 are both 2 away from 12: the smaller sum wins.
        let s = brute_force_subset_sum(&SubsetSumInstance::new(vec![10, 14], 12).unwrap()).unwrap();
        assert_eq!(s.best_sum, 10);
        // {0} and {1} both sum to 4: lower index list wins.
        let s = brute_force_subset_sum(&SubsetSumInstance::new(vec![4, 4], 4).unwrap()).unwrap();
        assert_eq!(s.indices, vec![0]);
    }

    #[test]
    fn overflowing_table_rejected() {
        assert!(reduce(&SubsetSumInstance::new(vec![3; 70], 1).unwrap()).is_err());
    }

    #[test]
    fn invalid_instances() {
        assert!(SubsetSumInstance::new(vec![], 3).is_err());
        assert!(SubsetSumInstance::new(vec![0, 2], 3).is_err());
        assert!(SubsetSumInstance::new(vec![1, 2], 0).is_err());
    }
}
