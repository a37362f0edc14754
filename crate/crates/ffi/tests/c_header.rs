//! Compiles a small C program against the generated header and the static
//! library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "trapdyn.h"

int main(void) {
    const char *cfg =
        "{\"params\": {\"rho\": 0.04, \"mu\": 0.012366, \"n\": 0.0047, \"eps\": 0.6, \"velocity\": 1.0},"
        " \"rule\": {\"r_star\": 0.06, \"slope_at_target\": 1.5},"
        " \"regime\": {\"kind\": \"debt_targeting\", \"a_star\": 0.6, \"phi\": 2.0}}";
    TrapdynModel *m = NULL;
    if (trapdyn_model_from_json(cfg, &m) != TRAPDYN_STATUS_OK) return 10;
    TrapdynSteadyState lo, hi;
    if (trapdyn_steady_states(m, &lo, &hi) != TRAPDYN_STATUS_OK) return 11;
    TrapdynEigen e;
    if (trapdyn_classify_steady(m, 1, &e) != TRAPDYN_STATUS_OK) return 12;
    if (e.classification != TRAPDYN_CLASSIFICATION_SADDLE) return 13;
    trapdyn_model_free(m);

    if (trapdyn_model_from_json("{", &m) != TRAPDYN_STATUS_CONFIG) return 14;
    const char *msg = trapdyn_last_error();
    if (msg == NULL || strlen(msg) == 0) return 15;
    printf("%.10f %.10f\n", lo.pi, hi.pi);
    return 0;
}
"#;

fn staticlib() -> Option<PathBuf> {
    // target/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libtrapdyn_ffi.a");
    lib.exists().then_some(lib)
}

fn compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/trapdyn.h")).unwrap();
    for name in [
        "typedef struct TrapdynModel TrapdynModel;",
        "trapdyn_model_from_json",
        "trapdyn_model_free",
        "trapdyn_last_error",
        "trapdyn_steady_states",
        "trapdyn_classify_matrix",
        "trapdyn_j22_local",
        "trapdyn_integrate",
        "TRAPDYN_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let (Some(cc), Some(lib)) = (compiler(), staticlib()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    let vals: Vec<f64> = text.split_whitespace().map(|s| s.parse().unwrap()).collect();
    assert!(vals[0] < vals[1]);
}
