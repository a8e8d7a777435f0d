use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::job::JobKind;

/// Per-pixel class codes (row-major) with an optional scalar channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Raster {
    pub kind: JobKind,
    pub width: usize,
    pub height: usize,
    pub classes: Vec<u8>,
    pub scalar: Option<Vec<f64>>,
    /// Pixels whose exploration hit a node cap.
    pub truncated_pixels: usize,
}

/// Class codes and their meaning for a job kind.
pub fn legend(kind: JobKind) -> &'static [(u8, &'static str)] {
    match kind {
        JobKind::ConnectednessLocus => &[(0, "exterior (critical orbit escapes)"), (1, "interior")],
        JobKind::FilledJulia => &[(0, "escaping"), (1, "bounded")],
        JobKind::HeckeLimitSet => &[(0, "no sample"), (1, "limit-set sample")],
        JobKind::DiscretenessScan => &[
            (0, "inconclusive"),
            (1, "certified non-discrete or elementary (Jørgensen violation)"),
            (2, "parabolic suspect"),
            (3, "degenerate parameter"),
        ],
        JobKind::MatingLimitSet => &[(0, "Ω"), (1, "Λ⁻"), (2, "Λ⁺")],
    }
}

fn gray(v: f64) -> [u8; 3] {
    let g = (255.0 * v.clamp(0.0, 1.0)).round() as u8;
    [g, g, g]
}

impl Raster {
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn class_at(&self, i: usize, j: usize) -> u8 {
        self.classes[j * self.width + i]
    }

    pub fn class_counts(&self) -> BTreeMap<u8, usize> {
        let mut counts = BTreeMap::new();
        for &c in &self.classes {
            *counts.entry(c).or_insert(0) += 1;
        }
        counts
    }

    pub fn count(&self, class: u8) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    fn color(&self, idx: usize) -> [u8; 3] {
        let class = self.classes[idx];
        let s = self.scalar.as_ref().map_or(0.0, |v| v[idx]);
        match self.kind {
            JobKind::ConnectednessLocus => match class {
                1 => [20, 28, 80],
                _ => gray(0.15 + 0.85 * (-s / 12.0).exp()),
            },
            JobKind::FilledJulia => match class {
                1 => [20, 28, 80],
                _ => gray(1.0 - (-4.0 * s).exp()),
            },
            JobKind::HeckeLimitSet => match class {
                1 => [0, 0, 0],
                _ => [255, 255, 255],
            },
            JobKind::DiscretenessScan => match class {
                0 => gray(0.35 + 0.2 * s.max(1.0).ln()),
                1 => [70, 70, 70],
                2 => [200, 30, 30],
                _ => [30, 60, 200],
            },
            JobKind::MatingLimitSet => match class {
                1 => [30, 70, 200],
                2 => [200, 40, 40],
                _ => [255, 255, 255],
            },
        }
    }

    /// Binary PPM (P6) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(3 * self.len());
        for idx in 0..self.len() {
            out.extend_from_slice(&self.color(idx));
        }
        out
    }

    pub fn write_ppm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&self.to_ppm())
    }

    /// Whether the pixels of `class` form one 8-connected component
    /// (false when there are none).
    pub fn is_connected(&self, class: u8) -> bool {
        let Some(start) = self.classes.iter().position(|&c| c == class) else {
            return false;
        };
        let mut seen = vec![false; self.len()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut reached = 0;
        while let Some(idx) = stack.pop() {
            reached += 1;
            let (i, j) = ((idx % self.width) as isize, (idx / self.width) as isize);
            for dj in -1..=1 {
                for di in -1..=1 {
                    let (ni, nj) = (i + di, j + dj);
                    if ni < 0 || nj < 0 || ni >= self.width as isize || nj >= self.height as isize {
                        continue;
                    }
                    let n = nj as usize * self.width + ni as usize;
                    if !seen[n] && self.classes[n] == class {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        reached == self.count(class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raster(classes: Vec<u8>, w: usize) -> Raster {
        Raster {
            kind: JobKind::MatingLimitSet,
            width: w,
            height: classes.len() / w,
            classes,
            scalar: None,
            truncated_pixels: 0,
        }
    }

    #[test]
    fn ppm_header_and_size() {
        let r = raster(vec![0, 1, 2, 0, 0, 0], 3);
        let ppm = r.to_ppm();
        assert!(ppm.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(ppm.len(), b"P6\n3 2\n255\n".len() + 18);
    }

    #[test]
    fn connectivity() {
        let r = raster(vec![1, 0, 0, 0, 1, 0, 0, 0, 1], 3);
        assert!(r.is_connected(1));
        let r = raster(vec![1, 0, 1, 0, 0, 0, 0, 0, 0], 3);
        assert!(!r.is_connected(1));
        assert!(!r.is_connected(2));
    }
}
