FORMATS = """\
Group sources
-------------
A source is either a family spec string or a path to a group file.

Family spec: family:prime[:comma-separated-params], products joined by '*'.

  abelian:p:e1,...,ek              C(p^e1) x ... x C(p^ek), order up to 4096
  heisenberg:p                     upper unitriangular 3x3 over F_p, p odd <= 7
  dihedral:2:n  (or dihedral:n)    dihedral of order n = 2^k, 4 <= n <= 256
  quaternion:2:n                   generalized quaternion, 8 <= n <= 256
  semidihedral:2:n                 semidihedral, 16 <= n <= 256
  modular_maximal_cyclic:p:n       <a, b | a^(p^(n-1)) = b^p = 1, a^b = a^(1+p^(n-2))>,
                                   n >= 3, p^n <= 2401
  A*B                              direct product, order up to 4096

  examples: heisenberg:3   abelian:2:1,2   dihedral:8   heisenberg:3*abelian:3:1

Group file (JSON), two variants:

  {"format": "mult-table", "name": "C3", "order": 3,
   "table": [[0,1,2],[1,2,0],[2,0,1]]}
      element 0 is the identity; table[i][j] = i*j.

  {"format": "perm-gens", "name": "D8", "degree": 4,
   "generators": [[1,2,3,0], [0,3,2,1]]}
      permutations of 0..degree-1 as image lists; x*g applies x first.

Triple file / output (JSON):

  {"p": 3, "dimV": 2, "dimW": 1, "beta": [[0, 1, [1]]]}
      beta lists beta(e_i, e_j) for i < j as W-coordinates; the map is
      extended alternately and bilinearly.

Output
------
check and triple print one JSON document. scan prints one JSON line per
group (sorted by name) followed by one summary line. Keys are sorted so
identical inputs give byte-identical output. Errors go to stderr as JSON.

Exit codes: 0 ok, 1 internal inconsistency, 2 input error,
3 cap or budget exceeded, 4 precondition failed.
"""
