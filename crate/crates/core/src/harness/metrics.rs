use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::game::EpisodeOutcome;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoleReturns {
    pub seeker: f64,
    pub provider: f64,
}

/// One learning-curve row: metrics over the window ending at `dialogue`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub dialogue: usize,
    pub success_rate: f64,
    pub seeker_return: f64,
    pub provider_return: f64,
    pub avg_turns: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_dialogues: usize,
    /// Objective success rate.
    pub success_rate: f64,
    pub seeker_success_rate: f64,
    pub provider_success_rate: f64,
    pub avg_return: RoleReturns,
    pub avg_turns: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curve: Vec<CurveRow>,
}

/// The per-dialogue numbers the metrics are built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DialogueStats {
    pub success: bool,
    pub seeker_success: bool,
    pub provider_success: bool,
    pub seeker_return: f64,
    pub provider_return: f64,
    pub turns: usize,
}

impl From<&EpisodeOutcome> for DialogueStats {
    fn from(o: &EpisodeOutcome) -> Self {
        DialogueStats {
            success: o.objective_success,
            seeker_success: o.seeker_success,
            provider_success: o.provider_success,
            seeker_return: o.seeker_return,
            provider_return: o.provider_return,
            turns: o.turns,
        }
    }
}

impl MetricsReport {
    /// Averages in the given order; the report of zero dialogues is all zeros.
    pub fn aggregate<'a>(stats: impl IntoIterator<Item = &'a DialogueStats>) -> Self {
        let mut r = MetricsReport::default();
        for s in stats {
            r.n_dialogues += 1;
            r.success_rate += f64::from(u8::from(s.success));
            r.seeker_success_rate += f64::from(u8::from(s.seeker_success));
            r.provider_success_rate += f64::from(u8::from(s.provider_success));
            r.avg_return.seeker += s.seeker_return;
            r.avg_return.provider += s.provider_return;
            r.avg_turns += s.turns as f64;
        }
        if r.n_dialogues > 0 {
            let n = r.n_dialogues as f64;
            r.success_rate /= n;
            r.seeker_success_rate /= n;
            r.provider_success_rate /= n;
            r.avg_return.seeker /= n;
            r.avg_return.provider /= n;
            r.avg_turns /= n;
        }
        r
    }

    /// Field-wise mean and population standard deviation.
    pub fn mean_and_spread(reports: &[MetricsReport]) -> (MetricsReport, MetricsReport) {
        let fields = |r: &MetricsReport| {
            [
                r.success_rate,
                r.seeker_success_rate,
                r.provider_success_rate,
                r.avg_return.seeker,
                r.avg_return.provider,
                r.avg_turns,
            ]
        };
        let build = |v: [f64; 6], n: usize| MetricsReport {
            n_dialogues: n,
            success_rate: v[0],
            seeker_success_rate: v[1],
            provider_success_rate: v[2],
            avg_return: RoleReturns {
                seeker: v[3],
                provider: v[4],
            },
            avg_turns: v[5],
            curve: Vec::new(),
        };
        let k = reports.len().max(1) as f64;
        let mut mean = [0.0; 6];
        for r in reports {
            for (m, x) in mean.iter_mut().zip(fields(r)) {
                *m += x / k;
            }
        }
        let mut var = [0.0; 6];
        for r in reports {
            for ((v, x), m) in var.iter_mut().zip(fields(r)).zip(mean) {
                *v += (x - m) * (x - m) / k;
            }
        }
        let n = reports.first().map_or(0, |r| r.n_dialogues);
        (build(mean, n), build(var.map(f64::sqrt), n))
    }
}

/// Moving window over the most recent dialogues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub width: usize,
    pub recent: VecDeque<DialogueStats>,
}

impl Window {
    pub fn new(width: usize) -> Self {
        Window {
            width,
            recent: VecDeque::with_capacity(width),
        }
    }

    pub fn push(&mut self, s: DialogueStats) {
        if self.recent.len() == self.width {
            self.recent.pop_front();
        }
        self.recent.push_back(s);
    }

    pub fn row(&self, dialogue: usize) -> CurveRow {
        let m = MetricsReport::aggregate(&self.recent);
        CurveRow {
            dialogue,
            success_rate: m.success_rate,
            seeker_return: m.avg_return.seeker,
            provider_return: m.avg_return.provider,
            avg_turns: m.avg_turns,
        }
    }
}

pub fn write_curve<W: Write>(out: W, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_curve(text: &str) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(success: bool, ret: f64, turns: usize) -> DialogueStats {
        DialogueStats {
            success,
            seeker_success: success,
            provider_success: false,
            seeker_return: ret,
            provider_return: -ret,
            turns,
        }
    }

    #[test]
    fn aggregate_averages() {
        let rows = [stats(true, 10.0, 4), stats(false, -20.0, 30)];
        let m = MetricsReport::aggregate(&rows);
        assert_eq!(m.n_dialogues, 2);
        assert_eq!(m.success_rate, 0.5);
        assert_eq!(m.provider_success_rate, 0.0);
        assert_eq!(m.avg_return.seeker, -5.0);
        assert_eq!(m.avg_turns, 17.0);
    }

    #[test]
    fn spread_of_equal_reports_is_zero() {
        let m = MetricsReport::aggregate(&[stats(true, 1.0, 2)]);
        let (mean, sd) = MetricsReport::mean_and_spread(&[m.clone(), m.clone()]);
        assert_eq!(mean.success_rate, 1.0);
        assert_eq!(sd.success_rate, 0.0);
        let other = MetricsReport::aggregate(&[stats(false, 1.0, 2)]);
        let (mean, sd) = MetricsReport::mean_and_spread(&[m, other]);
        assert_eq!(mean.success_rate, 0.5);
        assert_eq!(sd.success_rate, 0.5);
    }

    #[test]
    fn window_keeps_only_recent() {
        let mut w = Window::new(2);
        w.push(stats(false, 0.0, 2));
        w.push(stats(true, 0.0, 2));
        w.push(stats(true, 0.0, 4));
        let row = w.row(3);
        assert_eq!(row.success_rate, 1.0);
        assert_eq!(row.avg_turns, 3.0);
    }

    #[test]
    fn curve_csv_round_trip() {
        let rows = vec![
            CurveRow {
                dialogue: 200,
                success_rate: 0.125,
                seeker_return: -31.5,
                provider_return: -30.25,
                avg_turns: 27.0,
            },
            CurveRow {
                dialogue: 400,
                success_rate: 0.1 + 0.2,
                seeker_return: 1e-3,
                provider_return: 0.0,
                avg_turns: 3.5,
            },
        ];
        let mut buf = Vec::new();
        write_curve(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("dialogue,success_rate,"));
        assert_eq!(read_curve(&text).unwrap(), rows);
    }
}
