//! Process-global FFT plan cache and d-dimensional unitary transforms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

enum Direction {
    Forward,
    Inverse,
}

fn plan(len: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    let cell = PLANNER.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cell.lock().expect("fft planner poisoned");
    let forward = matches!(dir, Direction::Forward);
    let (planner, cache) = &mut *guard;
    cache
        .entry((len, forward))
        .or_insert_with(|| {
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// In-place unitary d-dimensional DFT over one component plane of length
/// `m^d`. Axis 0 is the slowest index.
pub fn transform(data: &mut [Complex64], dim: usize, m: usize, forward: bool) {
    debug_assert_eq!(data.len(), m.pow(dim as u32));
    let fft = plan(
        m,
        if forward {
            Direction::Forward
        } else {
            Direction::Inverse
        },
    );
    let total = data.len();
    let mut scratch = vec![Complex64::default(); m];
    for axis in 0..dim {
        // stride between consecutive entries along `axis`
        let stride = m.pow((dim - 1 - axis) as u32);
        let lines = total / m;
        for line in 0..lines {
            // base index of this line: enumerate all index tuples with the
            // `axis` coordinate fixed to zero
            let block = line / stride;
            let offset = line % stride;
            let base = block * stride * m + offset;
            if stride == 1 {
                fft.process(&mut data[base..base + m]);
            } else {
                for (i, s) in scratch.iter_mut().enumerate() {
                    *s = data[base + i * stride];
                }
                fft.process(&mut scratch);
                for (i, s) in scratch.iter().enumerate() {
                    data[base + i * stride] = *s;
                }
            }
        }
        let norm = 1.0 / (m as f64).sqrt();
        for v in data.iter_mut() {
            *v *= norm;
        }
    }
}
