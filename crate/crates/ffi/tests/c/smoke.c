#include <stdio.h>
#include "attk2.h"
int main(int argc, char **argv) {
  Attk2Store *s = NULL;
  if (attk2_store_build(argv[1], 2, &s) != ATTK2_STATUS_OK) { printf("err %s\n", attk2_last_error()); return 1; }
  char *out = NULL;
  attk2_run_script(s, "GetNodeType\t4\nNeighbors\tResearcher\t4\n", &out);
  printf("%s", out);
  attk2_string_free(out);
  attk2_store_free(s);
  return 0;
}
