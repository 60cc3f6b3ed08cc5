use cde::engine::{self, RunConfig};
use cde::problems;
use cde::stats;

fn trials(problem: &cde::problems::Problem, cfg_for: impl Fn(u64) -> RunConfig, n: usize, base: u64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let cfg = cfg_for(base + k as u64);
            let r = engine::run(problem, &cfg).unwrap();
            (r.best.eval.objective, r.best.eval.violation)
        })
        .collect()
}

fn main() {
    let base = 42u64;
    for name in ["cbd", "cbhd", "gtd", "tbtd", "tcd", "wbd"] {
        let p = problems::lookup(name).unwrap();
        let outs = trials(&p, |s| RunConfig::competitive(s, 10_000), 30, base);
        let objs: Vec<f64> = outs.iter().map(|o| o.0).collect();
        let feas = outs.iter().filter(|o| o.1 == 0.0).count();
        let mut sorted = objs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "{name}: mean={:.9e} std={:.3e} min={:.9e} max={:.9e} median={:.3e} feasible={feas}/30",
            stats::sample_mean(&objs),
            stats::sample_std(&objs),
            sorted[0],
            sorted[29],
            (sorted[14] + sorted[15]) / 2.0,
        );
    }

    // TCD extended-budget oracle: best over 30 trials at 100k FE.
    let tcd = problems::lookup("tcd").unwrap();
    let outs = trials(&tcd, |s| RunConfig::competitive(s, 100_000), 30, base);
    let best = outs.iter().map(|o| o.0).fold(f64::INFINITY, f64::min);
    println!("tcd oracle (100k FE, best of 30): {best:.15}");

    // Sphere D=30 at 15k FE: CDE vs baseline DE.
    let sphere = problems::lookup("sphere:30").unwrap();
    let cde_objs: Vec<f64> = trials(&sphere, |s| RunConfig::competitive(s, 15_000), 30, base)
        .iter().map(|o| o.0).collect();
    let de_objs: Vec<f64> = trials(&sphere, |s| RunConfig::classic_de(s, 15_000), 30, base)
        .iter().map(|o| o.0).collect();
    let p = stats::rank_sum_p(&cde_objs, &de_objs);
    println!(
        "sphere30: cde mean={:.3e} de mean={:.3e} rank-sum p={:.3e}",
        stats::sample_mean(&cde_objs),
        stats::sample_mean(&de_objs),
        p
    );

    // Sphere D=10 at 15k FE (single-run regression target from the engine contract).
    let sphere10 = problems::lookup("sphere:10").unwrap();
    let r = engine::run(&sphere10, &RunConfig::competitive(base, 15_000)).unwrap();
    println!("sphere10 single run best: {:.3e}", r.best.eval.objective);
}
