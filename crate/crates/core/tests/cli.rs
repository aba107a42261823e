use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dqform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqform"))
        .args(args)
        .env_remove("DQFORM_SEED")
        .output()
        .unwrap()
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_rows_match_printed_rates() {
    let out = dqform(&["spectrum", "--topology", "cycle", "--n", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("topology,n,directed,lambda2r,rate_t10,rate_t30,rate_t50,rate_t70\n"));
    let rate = csv_column(&text, "rate_t30")[0];
    assert_eq!(format!("{rate:.2e}"), "9.94e-10");

    let grid = |n: &str| {
        let out = dqform(&["spectrum", "--topology", "grid", "--n", n]);
        String::from_utf8(out.stdout).unwrap()
    };
    for n in ["16", "49", "100"] {
        assert_eq!(format!("{:.2e}", csv_column(&grid(n), "rate_t10")[0]), "4.54e-5");
    }
}

#[test]
fn simulate_writes_curve_and_states() {
    let dir = tempfile::tempdir().unwrap();
    let (curve, states) = (dir.path().join("err.csv"), dir.path().join("states.csv"));
    let out = dqform(&[
        "simulate", "--topology", "cycle", "--n", "5", "--no-stop", "--out", path_str(&curve), "--states",
        path_str(&states),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("stopped_at 350 status CapReached final_err "), "{stdout}");

    let text = fs::read_to_string(&curve).unwrap();
    let t = csv_column(&text, "t");
    assert_eq!(t.len(), 351);
    assert!((t[1] - 0.2).abs() < 1e-15, "default step is 0.2");
    assert!(*csv_column(&text, "err").last().unwrap() <= 1e-12);

    let dump = fs::read_to_string(&states).unwrap();
    assert!(dump.starts_with("k,agent,qs_w,qs_x,qs_y,qs_z,qd_w,qd_x,qd_y,qd_z\n"));
    assert_eq!(dump.lines().count(), 1 + 351 * 5);
}

#[test]
fn seed_comes_from_flag_or_environment() {
    let run = |args: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dqform"));
        cmd.args(["simulate", "--topology", "star", "--n", "10"]).args(args).env_remove("DQFORM_SEED");
        if let Some(s) = env {
            cmd.env("DQFORM_SEED", s);
        }
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(&["--seed", "7"], None), run(&[], Some("7")));
    assert_ne!(run(&[], Some("7")), run(&[], Some("8")));
    assert_eq!(run(&[], None), run(&["--seed", "1"], None));
}

#[test]
fn noise_reports_the_repair_residual() {
    let out = dqform(&["noise", "--topology", "grid", "--n", "9", "--sigma", "0.02", "--no-stop", "--out", "/dev/null"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<&str> = stdout.lines().next().unwrap().split(' ').collect();
    assert_eq!((fields[0], fields[2]), ("residual", "residual_after"));

    use dqform::feasibility::nearest_feasible;
    use dqform::graph::Topology;
    use dqform::udqdg::{build_dq_laplacian, desired_formation, perturb_scheme, relative_scheme};
    let g = Topology::Grid.generate(9, true).unwrap();
    let s = relative_scheme(&desired_formation(Topology::Grid, 9).unwrap(), &g).unwrap();
    let r = nearest_feasible(&build_dq_laplacian(&perturb_scheme(&s, 0.02, 1).unwrap())).unwrap();
    assert_eq!(fields[1], dqform::format_float(r.residual));
    assert_eq!(fields[3], dqform::format_float(r.residual_after));
}

#[test]
fn zero_noise_curves_coincide() {
    let out = dqform(&["noise", "--topology", "cycle", "--n", "7", "--sigma", "0", "--no-stop"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let (raw, fixed) = (csv_column(&text, "err_raw"), csv_column(&text, "err_repaired"));
    assert_eq!(raw.len(), 351);
    for (a, b) in raw.iter().zip(&fixed) {
        assert!((a - b).abs() <= 1e-12, "{a} {b}");
    }
}

#[test]
fn gen_dumps_round_trip_through_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, scheme, formation) =
        (dir.path().join("g.txt"), dir.path().join("s.txt"), dir.path().join("f.txt"));
    let out = dqform(&[
        "gen", "--topology", "star", "--n", "10", "--undirected", "--out", path_str(&edges), "--scheme",
        path_str(&scheme), "--formation", path_str(&formation),
    ]);
    assert!(out.status.success());
    let g = dqform::graph::DiGraph::parse_edge_list(&fs::read_to_string(&edges).unwrap()).unwrap();
    assert_eq!(g.n(), 10);
    assert_eq!(g.arcs().len(), 2 * 15);

    let from_files = dqform(&[
        "simulate", "--topology", "star", "--n", "10", "--undirected", "--scheme", path_str(&scheme),
        "--formation", path_str(&formation),
    ]);
    let generated = dqform(&["simulate", "--topology", "star", "--n", "10", "--undirected"]);
    assert!(from_files.status.success());
    assert_eq!(from_files.stdout, generated.stdout);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| dqform(args).status.code().unwrap();
    assert_eq!(code(&["spectrum", "--topology", "hex", "--n", "5"]), 2);
    assert_eq!(code(&["spectrum", "--topology", "star", "--n", "7"]), 2);
    assert_eq!(code(&["spectrum", "--topology", "grid", "--n", "10"]), 2);
    assert_eq!(code(&["spectrum", "--topology", "cycle", "--n", "2"]), 2);
    assert_eq!(code(&["noise", "--topology", "cycle", "--n", "5", "--sigma", "-0.1"]), 2);
    assert_eq!(code(&["simulate", "--topology", "cycle", "--n", "5", "--alpha", "-1"]), 2);

    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("s.txt");
    fs::write(&scheme, "n 4\n1 2 1 0 0 0 0 0 0 0\n3 4 1 0 0 0 0 0 0 0\n").unwrap();
    let out = dqform(&["simulate", "--topology", "cycle", "--n", "4", "--scheme", path_str(&scheme)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("spanning tree"));
}
