//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness; exits nonzero if any criterion fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use uigraph::audit::{log_factorial_bits, redundancy_report, AuditReport, Kind};
use uigraph::model::classic_to_universal_labeled;
use uigraph::{
    reconstruct_from_degrees, sample_uniform, AdjCode, CellProbeCode, ClassicRep, DegCode,
    SpillParams, UniversalRep,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `(n, seed)` pairs: 50 reps for each n in 1..=64, 5 reps at 200 and 500.
fn correctness_schedule() -> Vec<(usize, u64)> {
    let mut out = Vec::new();
    for n in 1..=64usize {
        for r in 0..50u64 {
            out.push((n, (n as u64) << 16 | r));
        }
    }
    for n in [200usize, 500] {
        for r in 0..5u64 {
            out.push((n, (n as u64) << 16 | r));
        }
    }
    out
}

fn adjacency_correctness() -> Outcome {
    let mut pairs = 0usize;
    for (n, seed) in correctness_schedule() {
        let rep = sample_uniform(n, seed).unwrap();
        let adj = AdjCode::build(&rep).map_err(|e| e.to_string())?;
        let cp = CellProbeCode::build(&rep).map_err(|e| e.to_string())?;
        for i in 1..=n {
            for j in 1..=n {
                let want = rep.adj(i, j).unwrap();
                ensure(adj.query(i, j).unwrap() == want, || {
                    format!("adj structure wrong at n={n} seed={seed} ({i},{j})")
                })?;
                ensure(cp.query(i, j).unwrap() == want, || {
                    format!("cellprobe structure wrong at n={n} seed={seed} ({i},{j})")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} ordered pairs agree for both structures"))
}

fn degree_correctness() -> Outcome {
    let mut vertices = 0usize;
    for (n, seed) in correctness_schedule() {
        let rep = sample_uniform(n, seed).unwrap();
        let code = DegCode::build(&rep).map_err(|e| e.to_string())?;
        for i in 1..=n {
            ensure(code.query(i).unwrap() == rep.deg(i).unwrap(), || {
                format!("degree wrong at n={n} seed={seed} vertex {i}")
            })?;
            vertices += 1;
        }
    }
    Ok(format!("{vertices} vertices agree"))
}

const SPACE_SIZES: [usize; 6] = [1 << 10, 1 << 12, 1 << 14, 1 << 16, 1 << 18, 1 << 20];

fn space_curve(kind: Kind, limit: f64) -> Outcome {
    let rows: Vec<AuditReport> = SPACE_SIZES
        .iter()
        .map(|&n| redundancy_report(kind, n, 2024, 0).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let norm: Vec<f64> = rows.iter().map(|r| r.normalized_redundancy).collect();
    let shown = norm
        .iter()
        .map(|v| format!("{v:.3}"))
        .collect::<Vec<_>>()
        .join(" ");
    let worst = norm.iter().cloned().fold(f64::MIN, f64::max);
    ensure(worst <= limit, || {
        format!("normalized redundancy {worst:.3} > {limit} ({shown})")
    })?;
    let drift = norm[norm.len() - 1] / norm[0];
    ensure(drift <= 2.0, || {
        format!("top/bottom ratio {drift:.3} > 2 ({shown})")
    })?;
    Ok(format!(
        "normalized redundancy {shown}; top/bottom {drift:.3}"
    ))
}

fn cellprobe_space() -> Outcome {
    let mut parts = Vec::new();
    for n in [1usize << 10, 1 << 14, 1 << 18] {
        let code =
            CellProbeCode::build(&sample_uniform(n, 77).unwrap()).map_err(|e| e.to_string())?;
        let bound = log_factorial_bits(n).ceil() as usize + 3;
        ensure(code.data_bits() <= bound, || {
            format!("n={n}: {} data bits > {bound}", code.data_bits())
        })?;
        parts.push(format!(
            "n={n}: data {} (ceil log2 n! + {}), meta {}",
            code.data_bits(),
            code.data_bits() as i64 - (bound as i64 - 3),
            code.meta_bits()
        ));
    }
    Ok(parts.join("; "))
}

fn probe_bounds() -> Outcome {
    let mut parts = Vec::new();
    for (kind, limit) in [(Kind::Adj, 8usize), (Kind::Deg, 12), (Kind::CellProbe, 4)] {
        let mut maxima = Vec::new();
        for &n in &SPACE_SIZES {
            let r = redundancy_report(kind, n, 99, 100_000).map_err(|e| e.to_string())?;
            maxima.push(r.probe_max);
        }
        let worst = *maxima.iter().max().unwrap();
        ensure(worst <= limit, || {
            format!("{kind}: max probes {maxima:?} exceed {limit}")
        })?;
        ensure(maxima.iter().all(|&m| m <= maxima[0] + 1), || {
            format!("{kind}: maxima {maxima:?} rise more than 1 above the smallest size")
        })?;
        parts.push(format!("{kind} {maxima:?}"));
    }
    Ok(parts.join("; "))
}

fn spill_link_properties() -> Outcome {
    for x in 1..=64u128 {
        for y in 1..=64u128 {
            let p = SpillParams::new(x, y).map_err(|e| e.to_string())?;
            let mut seen = HashSet::new();
            for a in 0..x {
                for b in 0..y {
                    let (m, s) = p.encode(a, b).unwrap();
                    ensure(m < 1u128 << p.m && s < p.s && seen.insert((m, s)), || {
                        format!("X={x} Y={y}: ({a},{b}) collides or overflows")
                    })?;
                    ensure(
                        p.decode_y(m).unwrap() == b && p.decode_x(m, s).unwrap() == a,
                        || format!("X={x} Y={y}: ({a},{b}) does not round-trip"),
                    )?;
                }
            }
        }
    }
    let mut ys: Vec<u128> = (2..=64).collect();
    ys.extend((65..=4096).step_by(37));
    ys.push(4096);
    let (mut checked, mut violations) = (0usize, 0usize);
    let mut worst = (0.0f64, 0u128, 0u128, 0.0f64);
    for x in 4..=4096u128 {
        let bound = (1.0 + 2.0 / (x as f64).sqrt()).log2();
        for &y in &ys {
            let r = SpillParams::new(x, y).unwrap().redundancy();
            checked += 1;
            if r > bound + 1e-12 {
                violations += 1;
                if r / bound > worst.0 {
                    worst = (r / bound, x, y, r);
                }
            }
        }
    }
    ensure(violations == 0, || {
        format!(
            "injectivity and round trip hold for all X,Y <= 64, but {violations} of {checked} links \
             exceed log2(1 + 2/sqrt X); worst X={} Y={} has {:.4} bits ({:.2}x the bound)",
            worst.1, worst.2, worst.3, worst.0
        )
    })?;
    Ok(format!(
        "exhaustive X,Y <= 64 injective; {checked} sampled links within bound"
    ))
}

fn classic_pipeline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..200 {
        let n = rng.random_range(1..=8usize);
        let mut points: Vec<usize> = (1..=2 * n).collect();
        points.shuffle(&mut rng);
        let intervals = points
            .chunks(2)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
            .collect();
        let classic = ClassicRep::new(intervals).map_err(|e| e.to_string())?;
        let (rep, label) = classic_to_universal_labeled(&classic);
        for a in 0..n {
            for b in 0..n {
                ensure(
                    classic.intersects(a, b) == rep.adj(label[a], label[b]).unwrap(),
                    || format!("trial {trial}: intervals {a},{b} change adjacency"),
                )?;
            }
        }
    }
    Ok("200 random classic representations keep their adjacency".into())
}

/// Mixed-radix index of a representation in `[n!]`.
fn rep_index(rep: &UniversalRep) -> usize {
    let n = rep.n();
    rep.endpoints()
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &e)| acc * (n - k) + (e - k - 1))
}

fn sampling_uniformity() -> Outcome {
    let mut parts = Vec::new();
    for n in [3usize, 4, 5] {
        let cells: usize = (1..=n).product();
        let mut counts = vec![0u64; cells];
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + n as u64);
        let samples = 1_000_000u64;
        for _ in 0..samples {
            counts[rep_index(&UniversalRep::sample(n, &mut rng).unwrap())] += 1;
        }
        let expected = samples as f64 / cells as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let p = ChiSquared::new((cells - 1) as f64).unwrap().sf(stat);
        ensure(p > 1e-3, || {
            format!("n={n}: chi-square {stat:.2}, p = {p:.2e}")
        })?;
        parts.push(format!("n={n} p={p:.3}"));
    }
    Ok(parts.join(", "))
}

fn reconstruction_round_trips() -> Outcome {
    let mut count = 0;
    for n in [1usize, 2, 3, 10, 100, 1000, 10_000] {
        for seed in 0..3u64 {
            let rep = sample_uniform(n, seed).unwrap();
            let degrees = rep.degrees();
            let back =
                reconstruct_from_degrees(|i| Ok(degrees[i - 1]), n).map_err(|e| e.to_string())?;
            ensure(back == rep, || {
                format!("degree oracle round trip fails at n={n}")
            })?;
            let deg = DegCode::build(&rep).map_err(|e| e.to_string())?;
            ensure(deg.reconstruct().unwrap() == rep, || {
                format!("degree structure round trip fails at n={n}")
            })?;
            let adj = AdjCode::build(&rep).map_err(|e| e.to_string())?;
            ensure(adj.decode().unwrap() == rep, || {
                format!("endpoint decode fails at n={n}")
            })?;
            ensure(adj.reconstruct_via_queries().unwrap() == rep, || {
                format!("adjacency-query reconstruction fails at n={n}")
            })?;
            count += 1;
        }
    }
    for n in [1usize, 10, 500] {
        ensure(
            DegCode::build(&UniversalRep::edgeless(n).unwrap())
                .unwrap()
                .reconstruct()
                .unwrap()
                == UniversalRep::edgeless(n).unwrap(),
            || format!("edgeless n={n} does not round-trip"),
        )?;
    }
    Ok(format!(
        "{count} representations round-trip through all three paths"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "adjacency structures match the reference",
            adjacency_correctness,
        ),
        ("degree structure matches the reference", degree_correctness),
        (
            "adj space within C*sqrt(n)*log2(n), C <= 8, no drift",
            || space_curve(Kind::Adj, 8.0),
        ),
        (
            "deg space within C*n^(2/3)*log2(n), C <= 8, no drift",
            || space_curve(Kind::Deg, 8.0),
        ),
        (
            "cellprobe data bits within ceil(log2 n!) + 3",
            cellprobe_space,
        ),
        ("probe counts bounded and flat", probe_bounds),
        (
            "spill link injectivity and per-link redundancy",
            spill_link_properties,
        ),
        (
            "classic to universal conversion keeps adjacency",
            classic_pipeline,
        ),
        (
            "sampler is uniform over all n! representations",
            sampling_uniformity,
        ),
        ("reconstruction round trips", reconstruction_round_trips),
    ];
    // keep panics inside a criterion from spraying backtraces
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name} ({secs:.1}s): {detail}",
                idx + 1
            ),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {why}", idx + 1);
                failed.push(idx + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", criteria.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
