//! Checks the generated C header: it must exist, declare the full surface,
//! and compile as C when a C compiler is available.

use std::path::Path;
use std::process::Command;

const SYMBOLS: [&str; 15] = [
    "convrptw_version",
    "convrptw_last_error",
    "convrptw_instance_read",
    "convrptw_instance_from_json",
    "convrptw_instance_free",
    "convrptw_instance_customer_count",
    "convrptw_instance_day_count",
    "convrptw_instance_capacity",
    "convrptw_solve",
    "convrptw_update",
    "convrptw_oracle_min_vehicles",
    "convrptw_solution_read",
    "convrptw_solution_write",
    "convrptw_solution_free",
    "convrptw_solution_metrics",
];

#[test]
fn header_declares_the_full_surface() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/convrptw.h");
    let text = std::fs::read_to_string(&header)
        .unwrap_or_else(|e| panic!("{}: {e}", header.display()));
    for symbol in SYMBOLS {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
    assert!(text.contains("CONVRPTW_STATUS_OK"), "status enum missing");
    assert!(
        text.contains("typedef struct ConvrptwInstance ConvrptwInstance;"),
        "instance handle must stay opaque"
    );
    assert!(
        text.contains("typedef struct ConvrptwSolution ConvrptwSolution;"),
        "solution handle must stay opaque"
    );
}

#[test]
fn header_compiles_as_c() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/convrptw.h");
    assert!(header.exists(), "build script must generate the header");

    let probe = Command::new("cc").arg("--version").output();
    if !probe.map(|o| o.status.success()).unwrap_or(false) {
        eprintln!("skipping: no C compiler on PATH");
        return;
    }

    let dir = tempfile::tempdir().unwrap();
    let main_c = dir.path().join("use_header.c");
    std::fs::write(
        &main_c,
        r#"
#include <convrptw.h>
#include <stddef.h>

int main(void) {
    ConvrptwInstance *inst = NULL;
    ConvrptwStatus status = convrptw_instance_read("missing.json", &inst);
    if (status != CONVRPTW_STATUS_OK && convrptw_last_error() == NULL) {
        return 1;
    }
    ConvrptwMetrics metrics;
    (void)metrics;
    convrptw_instance_free(inst);
    return (int)convrptw_instance_customer_count(NULL);
}
"#,
    )
    .unwrap();
    let out = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&main_c)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "header failed to compile as C:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
