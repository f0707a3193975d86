/* Build: cargo build -p a11y-audit-ffi --release
 *        cc crates/ffi/examples/audit.c -Icrates/ffi/include \
 *           target/release/liba11y_audit_ffi.a -lpthread -ldl -lm -o audit
 * Usage: ./audit <corpus-dir>
 */
#include <stdio.h>
#include "a11y_audit.h"

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s <corpus-dir>\n", argv[0]);
        return 2;
    }
    A11ySnapshot *snap = NULL;
    if (a11y_audit_dir(argv[1], NULL, NULL, &snap) != A11Y_STATUS_OK) {
        fprintf(stderr, "error: %s\n", a11y_last_error());
        return 2;
    }
    size_t issues = 0, gating = 0;
    a11y_snapshot_issue_count(snap, &issues);
    a11y_snapshot_gate_count(snap, NULL, "error", &gating);
    char *summary = NULL;
    if (a11y_snapshot_render(snap, "markdown", &summary) == A11Y_STATUS_OK) {
        fputs(summary, stdout);
        a11y_string_free(summary);
    }
    printf("\n%zu issues, %zu gating\n", issues, gating);
    a11y_snapshot_free(snap);
    return gating == 0 ? 0 : 1;
}
