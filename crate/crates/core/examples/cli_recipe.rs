//! Drives the command-line front end in-process, as the `floquet` binary would.

use bichromatic_floquet::cli::run;

fn main() {
    let out = std::env::temp_dir().join("floquet_line.csv");
    let out = out.to_string_lossy();
    for argv in [
        vec![
            "floquet", "gap", "--omega", "10", "--b", "1", "--Omega", "0", "--nu", "0", "--N1",
            "3", "--N2", "1",
        ],
        vec![
            "floquet",
            "optimal-omega",
            "--b",
            "0.05",
            "--Omega",
            "0.1",
            "--nu",
            "0.1",
        ],
        vec![
            "floquet", "line", "--axis", "b", "--count", "21", "--output", &out,
        ],
    ] {
        let code = run(argv);
        if code != 0 {
            std::process::exit(code);
        }
    }
}
