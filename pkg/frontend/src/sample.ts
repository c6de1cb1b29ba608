/** The bundled fire-alarm document, for one-click loading and tests. */

export const SAMPLE_DOCUMENT = `{"variables": [
  {"name": "tampering", "states": ["true", "false"], "parents": [],
   "cpt": [[0.02, 0.98]]},
  {"name": "fire", "states": ["true", "false"], "parents": [],
   "cpt": [[0.01, 0.99]]},
  {"name": "alarm", "states": ["true", "false"],
   "parents": ["fire", "tampering"],
   "cpt": [[0.5, 0.5], [0.99, 0.01], [0.85, 0.15], [0.0001, 0.9999]]},
  {"name": "smoke", "states": ["true", "false"], "parents": ["fire"],
   "cpt": [[0.9, 0.1], [0.01, 0.99]]},
  {"name": "leaving", "states": ["true", "false"], "parents": ["alarm"],
   "cpt": [[0.88, 0.12], [0.001, 0.999]]},
  {"name": "report", "states": ["true", "false"], "parents": ["leaving"],
   "cpt": [[0.75, 0.25], [0.01, 0.99]]}
]}`;
