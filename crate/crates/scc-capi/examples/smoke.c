/* Minimal C consumer: parse a population, query irreducibility, print
 * the finding. Build (from the repository root):
 *
 *   cargo build -p scc-capi
 *   cc crates/scc-capi/examples/smoke.c -Icrates/scc-capi/include \
 *      target/debug/libscc_capi.a -lpthread -ldl -lm -o smoke
 */
#include "scc_capi.h"

#include <assert.h>
#include <stdio.h>

int main(void) {
    printf("scc_capi %s\n", scc_version());

    const char *csv =
        "id,weight,D000,D001,D010,D011,D100,D101,D110,D111\n"
        "1,1,0,1,1,0,0,1,1,0\n"
        "2,1,0,1,1,0,0,1,1,1\n";
    SccPopulation *pop = NULL;
    if (scc_population_parse(csv, false, &pop) != SccStatus_Ok) {
        fprintf(stderr, "parse failed: %s\n", scc_last_error());
        return 1;
    }
    printf("individuals=%lld causes=%lld\n",
           (long long)scc_population_size(pop),
           (long long)scc_population_causes(pop));

    char *json = NULL;
    if (scc_irreducible_json(pop, "X2,!X3", &json) != SccStatus_Ok) {
        fprintf(stderr, "query failed: %s\n", scc_last_error());
        scc_population_free(pop);
        return 1;
    }
    printf("%s\n", json);
    scc_string_free(json);

    double p = 0.0;
    SccStatus s = scc_pns(pop, "X1,X2,X3", &p);
    assert(s == SccStatus_DataError); /* count-mode population */
    printf("expected data error: %s\n", scc_last_error());

    scc_population_free(pop);
    return 0;
}
