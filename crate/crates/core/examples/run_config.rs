//! A batch run from a JSON configuration, as `smoothlab run` does it.
//! Reports go under the system temp directory.

use smoothlab::cli::{execute, parse_config, write_outputs};

const CONFIG: &str = r#"{
  "schema": 1,
  "functions": ["abs_pow_1.5", "poly_cheb_2"],
  "emit": ["csv", "json"],
  "checks": [
    {"id": "direct", "params": {"k": 2, "r": 1, "p": 2, "n_range": {"lo": 16, "hi": 64, "step": 16}}},
    {"id": "hierarchy", "label": "hierarchy_p2", "params": {"k": 3, "r": 0, "p": 2, "t_grid": {"lo": 0.015625, "hi": 0.5}}}
  ]
}"#;

fn main() {
    let cfg = match parse_config(CONFIG) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("invalid configuration: {e}");
            std::process::exit(64);
        }
    };
    let summary = execute(&cfg, 2);
    print!("{}", summary.table_text());

    let dir = std::env::temp_dir().join("smoothlab-example");
    match write_outputs(&cfg, &summary, &dir) {
        Ok(files) => println!("{} files under {}", files.len(), dir.display()),
        Err(e) => eprintln!("writing {}: {e}", dir.display()),
    }
    std::process::exit(summary.exit_code());
}
