use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dwlab::dw_solver::{solve_instance, SolveReport, SolverConfig};
use dwlab::game_value::GameMatrix;
use dwlab::harness::{read_gap_csv, read_records_csv};
use dwlab::instance_gen::{bernoulli_matrix, generate_hard_instance, read_instance, write_instance, PackingInstance};
use dwlab::rational::{self, ratio, Rational};
use dwlab::theorem_lab::min_submatrix_value;

fn dwlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn save(dir: &Path, name: &str, inst: &PackingInstance) -> String {
    let p = dir.join(name);
    write_instance(&p, inst).unwrap();
    p.to_str().unwrap().to_string()
}

fn matrix_instance(rows: &[&[i64]], b: Rational) -> PackingInstance {
    let a = GameMatrix::from_int_rows(rows).unwrap();
    let m = a.rows();
    PackingInstance::simplex(a, vec![b; m]).unwrap()
}

fn summary_field(text: &str, key: &str) -> Rational {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap();
    rational::parse(line.split_whitespace().nth(1).unwrap()).unwrap()
}

#[test]
fn gen_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let o = dwlab(&["gen", "--m", "4", "--rho", "4", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let back = read_instance(&path).unwrap();
    assert_eq!(back, generate_hard_instance(4, &ratio(4, 1), 7).unwrap());
    assert_eq!(back.to_json(), fs::read_to_string(&path).unwrap());
}

#[test]
fn gen_rejects_small_rho() {
    let o = dwlab(&["gen", "--m", "4", "--rho", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("rho must exceed 2"));
}

#[test]
fn gen_prints_width_and_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let o = dwlab(&["gen", "--m", "400", "--rho", "4", "--seed", "1", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let value = summary_field(&text, "value");
    let width = summary_field(&text, "width");
    assert_eq!(width * value, ratio(1, 1));
}

#[test]
fn value_modes() {
    let dir = tempfile::tempdir().unwrap();
    let p = save(dir.path(), "p.json", &matrix_instance(&[&[0, 1], &[1, 0]], ratio(1, 2)));
    let o = dwlab(&["value", &p]);
    assert!(o.status.success());
    let cert: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["upper"], "1/2");
    assert_eq!(cert["lower"], "1/2");

    let o = dwlab(&["value", &p, "--mode", "approx", "--tol", "1e-4", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let fields: Vec<Rational> = text.lines().nth(1).unwrap().split(',').map(|f| rational::parse(f).unwrap()).collect();
    assert!(fields[1] <= ratio(1, 2) && ratio(1, 2) <= fields[0]);

    let a = bernoulli_matrix(100, 10, &ratio(1, 4), 5).unwrap();
    let p = save(dir.path(), "r.json", &PackingInstance::simplex(a, vec![ratio(1, 1); 100]).unwrap());
    let exact: serde_json::Value = serde_json::from_str(&stdout(&dwlab(&["value", &p]))).unwrap();
    let approx: serde_json::Value =
        serde_json::from_str(&stdout(&dwlab(&["value", &p, "--mode", "approx", "--tol", "1/1000"]))).unwrap();
    let get = |v: &serde_json::Value, k: &str| rational::parse(v[k].as_str().unwrap()).unwrap();
    let v = get(&exact, "upper");
    assert!(get(&approx, "lower") <= v && v <= get(&approx, "upper"));
    assert!(get(&approx, "upper") - get(&approx, "lower") <= ratio(1, 1000));
}

#[test]
fn value_reports_parse_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, "{\"m\": 1,\n \"n\": 2,\n \"entries\": [\"1x\"]}").unwrap();
    let o = dwlab(&["value", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let one = save(dir.path(), "one.json", &matrix_instance(&[&[1]], ratio(1, 1)));
    let o = dwlab(&["solve", &one, "--eps", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(SolveReport::from_json(&stdout(&o)).unwrap().queries, 1);

    let inf = save(dir.path(), "inf.json", &matrix_instance(&[&[1, 1]], ratio(2, 5)));
    let o = dwlab(&["solve", &inf, "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let r = SolveReport::from_json(&stdout(&o)).unwrap();
    assert!(r.is_infeasible());

    let hard = save(dir.path(), "hard.json", &generate_hard_instance(400, &ratio(4, 1), 3).unwrap());
    let o = dwlab(&["solve", &hard, "--eps", "0.1", "--trajectory"]);
    assert_eq!(o.status.code(), Some(0));
    let r = SolveReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.queries, 342);
    assert_eq!(r.trajectory.unwrap().len(), 342);

    let o = dwlab(&["solve", &hard, "--eps", "0.1", "--budget", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(SolveReport::from_json(&stdout(&o)).unwrap().queries, 3);
}

#[test]
fn verify_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let small = save(dir.path(), "s.json", &generate_hard_instance(16, &ratio(4, 1), 2).unwrap());
    let o = dwlab(&["verify", &small, "--s-max", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_gap_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.last().unwrap().gap_ratio, ratio(1, 1));

    let id = save(dir.path(), "id.json", &matrix_instance(&[&[1, 0], &[0, 1]], ratio(1, 2)));
    let o = dwlab(&["verify", &id, "--s-max", "1"]);
    let rows = read_gap_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(rational::format(&rows[0].gap_ratio), "2/1");
    assert!(stderr(&o).contains("s=1 pass"));

    let a = bernoulli_matrix(20, 5, &ratio(1, 4), 11).unwrap();
    let p = save(dir.path(), "b.json", &PackingInstance::simplex(a.clone(), vec![ratio(1, 1); 20]).unwrap());
    let o = dwlab(&["verify", &p, "--s-max", "2"]);
    let rows = read_gap_csv(o.stdout.as_slice()).unwrap();
    for (s, row) in (1..=2).zip(&rows) {
        let lib = min_submatrix_value(&a, s).unwrap();
        assert_eq!(row.v_min_s, lib.value);
        assert_eq!(row.subsets_checked, lib.subsets_checked);
    }

    let wide = save(dir.path(), "w.json", &matrix_instance(&[&[1; 40]], ratio(1, 1)));
    let o = dwlab(&["verify", &wide, "--s-max", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--samples"));
    let o = dwlab(&["verify", &wide, "--s-max", "20", "--samples", "3"]);
    assert!(o.status.success());
}

fn run_experiment(dir: &Path, config: &str) -> Output {
    let cfg = dir.join("suite.toml");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    dwlab(&["experiment", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn experiment_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_experiment(
        dir.path(),
        "[[scaling]]\nname = \"empty\"\nm = [64]\nrho = [\"4\"]\neps = [\"1/5\"]\nseeds = []\n",
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("out/empty.csv")).unwrap();
    assert_eq!(text, "m,n,rho,eps,seed,queries,distinct_vertices,outcome,wall_time_ms\n");
    assert!(dir.path().join("out/manifest.json").exists());
}

#[test]
fn experiment_single_cell_matches_solve() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_experiment(
        dir.path(),
        "[[scaling]]\nname = \"one\"\nm = [100]\nrho = [\"4\"]\neps = [\"1/5\"]\nseeds = [4]\n",
    );
    assert!(o.status.success());
    let recs = read_records_csv(fs::File::open(dir.path().join("out/one.csv")).unwrap()).unwrap();
    assert_eq!(recs.len(), 1);

    let inst = generate_hard_instance(100, &ratio(4, 1), 4).unwrap();
    let p = save(dir.path(), "i.json", &inst);
    let direct = SolveReport::from_json(&stdout(&dwlab(&["solve", &p, "--eps", "1/5", "--trajectory"]))).unwrap();
    assert_eq!(recs[0].queries, Some(direct.queries));
    assert_eq!(recs[0].outcome, direct.outcome_name());
    assert_eq!(
        recs[0].distinct_vertices,
        Some(dwlab::dw_solver::count_distinct_vertices(&direct).unwrap() as u64)
    );
    let lib = solve_instance(&inst, &SolverConfig::new(ratio(1, 5))).unwrap();
    assert_eq!(lib.queries, direct.queries);
}

#[test]
fn experiment_failed_cell_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_experiment(
        dir.path(),
        "[[scaling]]\nname = \"bad\"\nm = [64]\nrho = [\"4\", \"2\"]\neps = [\"1/5\"]\nseeds = [0]\n",
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("failed cell"));
    let recs = read_records_csv(fs::File::open(dir.path().join("out/bad.csv")).unwrap()).unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[1].outcome, "error");
}

#[test]
fn experiment_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_experiment(dir.path(), "paralel = 2\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("paralel"));
}
