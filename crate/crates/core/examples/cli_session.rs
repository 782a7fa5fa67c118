//! Drive the command-line front end in-process against a temp directory.

use gfre::cli::{run_with, EXIT_OK};

pub fn run_example() -> Result<Vec<i32>, Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("gfre-cli-example-{}", std::process::id()));
    let d = dir.to_str().ok_or("non-UTF-8 temp dir")?;
    let eqn = format!("{d}/gf4.eqn");
    let truth = format!("{d}/gf4.truth.json");
    let sessions: Vec<Vec<&str>> = vec![
        vec!["gfre", "generate", "-m", "4", "-p", "4,1,0", "-o", d],
        vec!["gfre", "verify", &eqn, "--map", &truth, "-T", "2"],
        vec!["gfre", "reveng", &eqn, "--scramble-seed", "9", "--report", "text"],
    ];
    let mut codes = Vec::new();
    for args in sessions {
        println!("$ {}", args.join(" "));
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(args, &mut out, &mut err);
        print!(
            "{}{}",
            String::from_utf8_lossy(&out),
            String::from_utf8_lossy(&err)
        );
        println!("exit {code}");
        codes.push(code);
    }
    std::fs::remove_dir_all(&dir)?;
    if codes.iter().any(|&c| c != EXIT_OK) {
        return Err("a command failed".into());
    }
    Ok(codes)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("cli session");
}
