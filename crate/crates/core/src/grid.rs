//! Evaluation grids.
//!
//! Asymptotic statements ("for all large enough x") are operationalized on a
//! geometric grid; verdicts look at its tail half.

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn from_points(mut points: Vec<f64>) -> Self {
        points.retain(|p| p.is_finite());
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();
        Grid { points }
    }

    /// `count` points `start * ratio^j`, j = 0..count.
    pub fn geometric(start: f64, ratio: f64, count: usize) -> Self {
        assert!(start > 0.0 && ratio > 1.0 && count >= 2);
        let mut points = Vec::with_capacity(count);
        let mut x = start;
        for _ in 0..count {
            points.push(x);
            x *= ratio;
        }
        Grid { points }
    }

    /// Default grid for membership checks: 24 doubling steps from 1e3.
    pub fn default_membership() -> Self {
        Self::geometric(1e3, 2.0, 24)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// The tail half, where asymptotic verdicts are formed.
    pub fn tail(&self) -> &[f64] {
        &self.points[self.points.len() / 2..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_spacing_and_tail() {
        let g = Grid::geometric(1e3, 2.0, 24);
        assert_eq!(g.len(), 24);
        assert_eq!(g.first(), 1e3);
        assert_eq!(g.last(), 1e3 * 2f64.powi(23));
        assert_eq!(g.tail().len(), 12);
        assert_eq!(g.tail()[0], 1e3 * 2f64.powi(12));
    }
}
