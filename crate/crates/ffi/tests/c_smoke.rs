use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "svqe.h"

int main(void) {
    SvqeHamiltonian *h = NULL;
    SvqeNoiseModel *n = NULL;
    double e0, theta, e, v[SVQE_PAULI_LEN];
    if (svqe_hamiltonian_bundled(3, &h) != SVQE_STATUS_OK) return 1;
    if (svqe_noise_model_ideal(&n) != SVQE_STATUS_OK) return 1;
    if (svqe_exact_solution(h, &e0, &theta) != SVQE_STATUS_OK) return 1;
    if (svqe_prepare_ansatz(theta, n, v) != SVQE_STATUS_OK) return 1;
    if (svqe_energy(h, v, &e) != SVQE_STATUS_OK) return 1;
    if (svqe_hamiltonian_bundled(1000, &h) != SVQE_STATUS_INVALID_ARGUMENT) return 1;
    if (svqe_last_error_message() == NULL) return 1;
    printf("%.12f %.12f\n", e0, e);
    svqe_hamiltonian_free(h);
    svqe_noise_model_free(n);
    return fabs(e - e0) < 1e-10 ? 0 : 2;
}
"#;

fn find_compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = find_compiler() else {
        eprintln!("skipped: no C compiler");
        return;
    };
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libsvqe_ffi.a");
    if !lib.exists() {
        eprintln!("skipped: {} not built", lib.display());
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let build = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stdout));
}
