# %% [markdown]
# # A worker over TCP
#
# Requests and responses are newline-delimited JSON with hex integers.

# %%
import socket

from expsos.arith import ArithContext, random_modulus
from expsos.blind import keygen
from expsos.cloud import Honest, remote_worker, start_server
from expsos.modexp_sos import outsource_ms

server = start_server("127.0.0.1:0", Honest())
print("listening on", server.endpoint)

# %%
ctx = ArithContext(3)
key = keygen(random_modulus(256, 2, ctx), None, ctx)
worker = remote_worker(server.endpoint)
for _ in range(3):
    u, a = ctx.randrange(0, key.N), ctx.randrange(1, 1 << 256)
    report = outsource_ms(key, u, a, 16, worker, ctx)
    print(report.verified.value, report.result == pow(u, a, key.N), report.local_mults)
worker.close()

# %% A raw request, by hand.
host, port = server.endpoint.rsplit(":", 1)
with socket.create_connection((host, int(port))) as sock:
    sock.sendall(b'{"id":"1","op":"modexp","u":"2","a":"a","l":"3e8"}\n')
    print(sock.makefile().readline().strip())
    sock.sendall(b'{"id":"2","op":"modexp","u":"zz","a":"1","l":"7"}\n')
    print(sock.makefile().readline().strip())

server.shutdown()
