use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::metrics::{AggregateMetrics, ConvergencePoint, EpisodeRow};

pub const EPISODE_HEADER: [&str; 11] = [
    "round",
    "seed",
    "distance_km",
    "duration_s",
    "collided",
    "hard_brakes",
    "interventions",
    "lc_policy",
    "lc_safeguard",
    "likelihood_ratio",
    "ln_likelihood_ratio",
];

pub const SUMMARY_HEADER: [&str; 15] = [
    "label",
    "rounds",
    "collisions",
    "travel_time_h",
    "travel_distance_km",
    "average_speed_kmh",
    "hard_brakes",
    "interventions",
    "lc_policy",
    "lc_safeguard",
    "collision_rate_per_1000km",
    "hard_brake_rate_per_1000km",
    "intervention_rate_per_1000km",
    "naturalistic_rate_per_1e6km",
    "naturalistic_std_error_per_1e6km",
];

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn o6(x: Option<f64>) -> String {
    x.map(f6).unwrap_or_default()
}

pub fn write_episodes<W: Write>(rows: &[EpisodeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EPISODE_HEADER)?;
    for r in rows {
        w.write_record([
            r.round.to_string(),
            r.seed.to_string(),
            f6(r.distance_km),
            f6(r.duration_s),
            (r.collided as u8).to_string(),
            r.hard_brakes.to_string(),
            r.interventions.to_string(),
            r.lc_policy.to_string(),
            r.lc_safeguard.to_string(),
            f6(r.likelihood_ratio()),
            f6(r.ln_likelihood_ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let s = rec.get(i).ok_or_else(|| Error::Parse(format!("missing column {}", EPISODE_HEADER[i])))?;
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value `{s}` in column {}", EPISODE_HEADER[i])))
}

pub fn read_episodes<R: Read>(input: R) -> Result<Vec<EpisodeRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(EPISODE_HEADER) {
        return Err(Error::Parse("unexpected episodes.csv header".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let collided: u8 = field(&rec, 4)?;
        rows.push(EpisodeRow {
            round: field(&rec, 0)?,
            seed: field(&rec, 1)?,
            distance_km: field(&rec, 2)?,
            duration_s: field(&rec, 3)?,
            collided: match collided {
                0 => false,
                1 => true,
                _ => return Err(Error::Parse("collided must be 0 or 1".into())),
            },
            hard_brakes: field(&rec, 5)?,
            interventions: field(&rec, 6)?,
            lc_policy: field(&rec, 7)?,
            lc_safeguard: field(&rec, 8)?,
            ln_likelihood_ratio: field(&rec, 10)?,
        });
    }
    Ok(rows)
}

pub fn write_summary<W: Write>(entries: &[(String, AggregateMetrics)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for (label, m) in entries {
        w.write_record([
            label.clone(),
            m.rounds.to_string(),
            m.collisions.to_string(),
            f6(m.travel_time_h),
            f6(m.travel_distance_km),
            o6(m.average_speed_kmh),
            m.hard_brakes.to_string(),
            m.interventions.to_string(),
            m.lc_policy.to_string(),
            m.lc_safeguard.to_string(),
            o6(m.collision_rate),
            o6(m.hard_brake_rate),
            o6(m.intervention_rate),
            o6(m.naturalistic_rate),
            o6(m.naturalistic_std_error),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_convergence<W: Write>(points: &[ConvergencePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "collisions", "distance_km", "collision_rate_per_1000km"])?;
    for p in points {
        w.write_record([
            p.round.to_string(),
            p.collisions.to_string(),
            f6(p.distance_km),
            o6(p.collision_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text table in the layout of a results table: one column per
/// configuration.
pub fn format_report(entries: &[(String, AggregateMetrics)]) -> String {
    let opt = |x: Option<f64>, d: usize| x.map(|v| format!("{v:.d$}")).unwrap_or_else(|| "-".into());
    let lines: Vec<(&str, Box<dyn Fn(&AggregateMetrics) -> String>)> = vec![
        ("Rounds", Box::new(|m| m.rounds.to_string())),
        ("Collisions", Box::new(|m| m.collisions.to_string())),
        ("Travel time (h)", Box::new(|m| format!("{:.3}", m.travel_time_h))),
        ("Travel distance (km)", Box::new(|m| format!("{:.1}", m.travel_distance_km))),
        ("Average speed (km/h)", Box::new(move |m| opt(m.average_speed_kmh, 1))),
        ("Hard brakes", Box::new(|m| m.hard_brakes.to_string())),
        ("Interventions", Box::new(|m| m.interventions.to_string())),
        ("Lane changes (policy)", Box::new(|m| m.lc_policy.to_string())),
        ("Lane changes (safeguard)", Box::new(|m| m.lc_safeguard.to_string())),
        ("Collisions /1000 km", Box::new(move |m| opt(m.collision_rate, 1))),
        ("Hard brakes /1000 km", Box::new(move |m| opt(m.hard_brake_rate, 1))),
        ("Interventions /1000 km", Box::new(move |m| opt(m.intervention_rate, 1))),
        ("Naturalistic /1e6 km", Box::new(move |m| {
            m.naturalistic_rate.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into())
        })),
    ];
    let width = lines.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    let mut s = format!("{:width$}", "");
    for (label, _) in entries {
        s += &format!("  {label:>14}");
    }
    s.push('\n');
    for (name, f) in &lines {
        s += &format!("{name:width$}");
        for (_, m) in entries {
            s += &format!("  {:>14}", f(m));
        }
        s.push('\n');
    }
    s
}
