"""Content-addressed cache for expensive intermediates.

Entries are JSON files named by the SHA-256 of their canonical key.  A hit
must round-trip the stored key exactly; anything malformed is treated as a
miss and never trusted.  Values are plain JSON payloads, so cached data is
bit-identical to a fresh recomputation by construction of the serializers.
"""

import hashlib
import json
import os
import tempfile


class Cache:
    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def _path(self, key):
        canon = json.dumps(key, sort_keys=True, separators=(",", ":"))
        h = hashlib.sha256(canon.encode()).hexdigest()
        return os.path.join(self.directory, h + ".json")

    def lookup(self, key):
        path = self._path(key)
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, ValueError):
            return None
        if not isinstance(data, dict) or data.get("key") != key:
            return None
        return data.get("value")

    def store(self, key, value):
        path = self._path(key)
        payload = {"key": key, "value": value}
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh, sort_keys=True)
            os.replace(tmp, path)
        except OSError:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
        return value


class NullCache:
    def lookup(self, key):
        return None

    def store(self, key, value):
        return value
