"""The search/controller split over a TCP socket: the search streams
feature diffs and rewards as newline-delimited JSON; the controller
answers with the open list to pop next.

Here both ends run in one process (controller on a thread) so the demo
is self-contained; the same controller could be a different process or
language.

Run:  python demos/05_bridge.py
"""

import threading

from dacsearch import (
    AlternationPolicy,
    connect_controller,
    gen_pi_n,
    make_portfolio,
    run_gbfs,
    serve_search,
)

task = gen_pi_n(8)
portfolio = make_portfolio(task)

box = {}
ready = threading.Event()


def on_listen(host, port):
    print(f"search listening on {host}:{port}")
    box["port"] = port
    ready.set()


server = threading.Thread(
    target=lambda: box.update(
        result=serve_search(task, portfolio, "127.0.0.1", 0, on_listen=on_listen)
    ),
    daemon=True,
)
server.start()
ready.wait(5.0)

messages = []


def choose(greeting, msg):
    messages.append(msg)
    return msg["t"] % greeting["n"]  # alternation, computed remotely


final = connect_controller("127.0.0.1", box["port"], choose)
server.join(5.0)

print(f"\ncontroller saw {len(messages)} step messages; first two:")
for msg in messages[:2]:
    print(f"  {msg}")
print(f"final message: t={final['t']} done={final['done']} outcome={final['outcome']}")

local = run_gbfs(task, make_portfolio(task), AlternationPolicy((0, 1)))
remote = box["result"]
print(f"\nremote-controlled run:  {remote.expansions} expansions")
print(f"in-process equivalent:  {local.expansions} expansions")
print(f"traces byte-identical:  {remote.fingerprint() == local.fingerprint()}")
