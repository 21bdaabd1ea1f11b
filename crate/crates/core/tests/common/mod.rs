#![allow(dead_code)]

use rand::Rng;
use selbounds::{Panel, PanelRecord};

pub fn unit(id: usize, d: bool, s0: bool, s1: bool, y0: f64, y1: f64) -> PanelRecord<f64> {
    PanelRecord {
        id: id.to_string(),
        d,
        s0,
        s1,
        y0: s0.then_some(y0),
        y1: s1.then_some(y1),
    }
}

/// Random panel where every unit is observed in both periods.
pub fn full_panel<R: Rng>(rng: &mut R, n: usize) -> Panel {
    let mut units: Vec<_> = (0..n)
        .map(|i| {
            let y0 = rng.random_range(-5.0..5.0);
            unit(
                i,
                i % 2 == 0,
                true,
                true,
                y0,
                y0 + rng.random_range(-3.0..6.0),
            )
        })
        .collect();
    // Guarantee both arms regardless of n.
    units[1].d = false;
    Panel::new(units).unwrap()
}

/// Panel with prescribed counts per `(d, s0, s1)` cell; outcomes follow a
/// simple deterministic pattern.
pub fn panel_from_counts(cells: &[((bool, bool, bool), usize)]) -> Panel {
    let mut units = Vec::new();
    for &((d, s0, s1), k) in cells {
        for j in 0..k {
            let i = units.len();
            let y0 = (j % 7) as f64;
            units.push(unit(i, d, s0, s1, y0, y0 + (j % 5) as f64 + d as u8 as f64));
        }
    }
    Panel::new(units).unwrap()
}

/// Counts with the same selection margins as the job-training application:
/// 148 of 585 control and 160 of 600 treated units employed at baseline.
pub fn training_counts() -> Panel {
    panel_from_counts(&[
        ((false, true, true), 94),
        ((false, true, false), 54),
        ((false, false, true), 221),
        ((false, false, false), 216),
        ((true, true, true), 102),
        ((true, true, false), 58),
        ((true, false, true), 228),
        ((true, false, false), 212),
    ])
}

/// Counts of the work-from-home application; nobody is missing at baseline.
pub fn wfh_counts() -> Panel {
    panel_from_counts(&[
        ((false, true, true), 77),
        ((false, true, false), 41),
        ((true, true, true), 110),
        ((true, true, false), 21),
    ])
}
