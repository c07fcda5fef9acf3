#!/usr/bin/env python3
"""Writes the simulator task scripts under fixtures/.

Deterministic: rerunning produces byte-identical files.
"""
import json
import pathlib
import sys

W, H = 1080, 1920
OUT = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "fixtures")


def grid(names, top=200, cols=3, cell_h=260, margin=40):
    """Lays names out as non-overlapping tiles, row-major."""
    cell_w = (W - margin * (cols + 1)) // cols
    out = []
    for i, name in enumerate(names):
        r, c = divmod(i, cols)
        x0 = margin + c * (cell_w + margin)
        y0 = top + r * (cell_h + margin)
        out.append({"box": [x0, y0, x0 + cell_w, y0 + cell_h], "name": name})
    return out


def rows(names, top=160, row_h=150, gap=20):
    """Full-width list rows."""
    return [{"box": [40, top + i * (row_h + gap), W - 40, top + i * (row_h + gap) + row_h], "name": n}
            for i, n in enumerate(names)]


def bar(name, y=60, h=120):
    return {"box": [40, y, W - 40, y + h], "name": name}


def screen(sid, elements, back=None):
    s = {"id": sid, "elements": elements}
    if back:
        s["back"] = back
    return s


def click(n):
    return {"action_type": "click", "id": n}


def longpress(n):
    return {"action_type": "longpress", "id": n}


def type_(t, n=None):
    a = {"action_type": "type", "text": t}
    if n is not None:
        a["id"] = n
    return a


def scroll(d):
    return {"action_type": "scroll", "direction": d}


ENTER = {"action_type": "enter"}
DONE = {"action_type": "task_complete"}
HOME = {"action_type": "navigate_home"}


def write(name, doc):
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / name
    path.write_text(json.dumps(doc, indent=1, sort_keys=False) + "\n")
    print(f"wrote {path}")


# Small three-screen search app.

def search_app():
    app = {
        "name": "search",
        "home": "home",
        "width": W,
        "height": H,
        "screens": [
            screen("home", [bar("Search bar"), *grid(["Chrome", "Settings", "Maps"], top=400)]),
            screen("search", [bar("Search field"), *rows(["Suggestion: weather", "Suggestion: news"], top=260)],
                   back="home"),
            screen("results", [bar("Search field"), *rows(["Walmart - official site", "Walmart near you",
                                                            "Walmart weekly ad"], top=260)], back="search"),
        ],
        "transitions": [
            {"from": "home", "to": "search", "on": {"click": 0}},
            {"from": "search", "to": "results", "on": {"type": ""}},
        ],
    }
    tasks = [{
        "id": "search_walmart",
        "instruction": "Search for walmart",
        "space": "aitw",
        "max_turns": 6,
        "goal": {"screen": "results", "typed_contains": ["walmart"]},
        "demo": [click(0), type_("walmart"), ENTER, DONE],
    }]
    return {"schema_version": 1, "app": app, "tasks": tasks}


# Phone with several apps; shared by the aitw and odyssey suites.

HOME_ICONS = ["Google search", "Chrome", "Settings", "Maps", "Play Store", "Gmail", "Clock", "Camera", "Photos",
              "YouTube"]
SETTINGS_TOP = ["Network & internet", "Connected devices", "Display", "Sound", "Battery"]
SETTINGS_MORE = ["Apps", "Storage", "Privacy", "Location", "About phone"]


def phone_app():
    scr = []
    tr = []

    def t(a, b, on):
        tr.append({"from": a, "to": b, "on": on})

    scr.append(screen("home", [bar("Google search bar"), *grid(HOME_ICONS[1:], top=300)]))
    # home labels: 0 search bar, 1 Chrome, 2 Settings, 3 Maps, 4 Play Store, 5 Gmail, 6 Clock, 7 Camera,
    # 8 Photos, 9 YouTube
    scr.append(screen("google_search", [bar("Search field"), *rows(["Recent: weather", "Recent: news"], top=260)],
                      back="home"))
    scr.append(screen("google_results", [bar("Search field"), *rows(["Top result", "Second result", "Images"],
                                                                     top=260)], back="google_search"))
    t("home", "google_search", {"click": 0})
    t("google_search", "google_results", {"type": ""})

    scr.append(screen("chrome", [bar("Address bar"), *grid(["Tabs", "Menu", "Bookmarks"], top=260)], back="home"))
    scr.append(screen("chrome_edit", [bar("Address field"), *rows(["Suggestion"], top=260)], back="chrome"))
    scr.append(screen("chrome_results", [bar("Address bar"), *rows(["Result 1", "Result 2", "Result 3"], top=260)],
                      back="chrome"))
    scr.append(screen("chrome_tabs", [bar("Tab switcher"), *grid(["New tab", "Close all"], top=260)], back="chrome"))
    scr.append(screen("chrome_bookmarks", rows(["Mobile bookmarks", "Desktop bookmarks"]), back="chrome"))
    t("home", "chrome", {"click": 1})
    t("chrome", "chrome_edit", {"click": 0})
    t("chrome_edit", "chrome_results", {"type": ""})
    t("chrome", "chrome_tabs", {"click": 1})
    t("chrome", "chrome_bookmarks", {"click": 3})

    scr.append(screen("settings", [bar("Search settings"), *rows(SETTINGS_TOP, top=260)], back="home"))
    scr.append(screen("settings_more", [bar("Search settings"), *rows(SETTINGS_MORE, top=260)], back="home"))
    t("home", "settings", {"click": 2})
    t("settings", "settings_more", {"scroll": "down"})
    t("settings_more", "settings", {"scroll": "up"})
    for i, name in enumerate(SETTINGS_TOP, start=1):
        sid = "settings_" + name.split()[0].lower()
        scr.append(screen(sid, [bar(name), *rows(["Toggle", "Advanced"], top=260)], back="settings"))
        t("settings", sid, {"click": i})
    for i, name in enumerate(SETTINGS_MORE, start=1):
        sid = "settings_" + name.split()[0].lower()
        scr.append(screen(sid, [bar(name), *rows(["Toggle", "Advanced"], top=260)], back="settings_more"))
        t("settings_more", sid, {"click": i})
    scr.append(screen("wifi_on", [bar("Wi-Fi"), *rows(["Wi-Fi on", "Saved networks"], top=260)],
                      back="settings_network"))
    t("settings_network", "wifi_on", {"click": 1})
    scr.append(screen("dark_mode_on", [bar("Display"), *rows(["Dark theme on"], top=260)], back="settings_display"))
    t("settings_display", "dark_mode_on", {"click": 1})
    scr.append(screen("battery_saver_on", [bar("Battery"), *rows(["Battery saver on"], top=260)],
                      back="settings_battery"))
    t("settings_battery", "battery_saver_on", {"click": 1})

    scr.append(screen("maps", [bar("Search here"), *grid(["Restaurants", "Gas", "Coffee"], top=260)], back="home"))
    scr.append(screen("maps_edit", [bar("Search field"), *rows(["Your location"], top=260)], back="maps"))
    scr.append(screen("maps_results", [bar("Search here"), *rows(["Place 1", "Place 2", "Place 3"], top=260)],
                      back="maps"))
    scr.append(screen("maps_route", [bar("Directions"), *rows(["Start"], top=260)], back="maps_results"))
    t("home", "maps", {"click": 3})
    t("maps", "maps_edit", {"click": 0})
    t("maps_edit", "maps_results", {"type": ""})
    t("maps_results", "maps_route", {"click": 1})
    for i, name in enumerate(["Restaurants", "Gas", "Coffee"], start=1):
        t("maps", "maps_results", {"click": i})

    scr.append(screen("play", [bar("Search apps & games"), *grid(["For you", "Top charts", "Kids"], top=260)],
                      back="home"))
    scr.append(screen("play_edit", [bar("Search field")], back="play"))
    scr.append(screen("play_results", [bar("Search apps & games"), *rows(["App 1", "App 2"], top=260)],
                      back="play"))
    scr.append(screen("play_app", [bar("App page"), *grid(["Install", "Share"], top=260)], back="play_results"))
    scr.append(screen("play_installing", [bar("Installing"), *rows(["Cancel"], top=260)], back="play_app"))
    t("home", "play", {"click": 4})
    t("play", "play_edit", {"click": 0})
    t("play_edit", "play_results", {"type": ""})
    t("play_results", "play_app", {"click": 1})
    t("play_app", "play_installing", {"click": 1})

    scr.append(screen("gmail", [bar("Search in mail"), *rows(["Inbox", "Compose"], top=260)], back="home"))
    scr.append(screen("gmail_compose", [bar("To"), *rows(["Subject", "Send"], top=260)], back="gmail"))
    scr.append(screen("gmail_sent", [bar("Message sent")], back="gmail"))
    t("home", "gmail", {"click": 5})
    t("gmail", "gmail_compose", {"click": 2})
    t("gmail_compose", "gmail_sent", {"click": 2})

    scr.append(screen("clock", [bar("Clock"), *grid(["Alarm", "Timer", "Stopwatch"], top=260)], back="home"))
    scr.append(screen("clock_alarm", [bar("Alarms"), *rows(["Add alarm"], top=260)], back="clock"))
    scr.append(screen("clock_alarm_set", [bar("Alarm set"), *rows(["Done"], top=260)], back="clock_alarm"))
    scr.append(screen("clock_timer", [bar("Timer"), *rows(["Start"], top=260)], back="clock"))
    scr.append(screen("clock_timer_running", [bar("Timer running")], back="clock_timer"))
    t("home", "clock", {"click": 6})
    t("clock", "clock_alarm", {"click": 1})
    t("clock_alarm", "clock_alarm_set", {"click": 1})
    t("clock", "clock_timer", {"click": 2})
    t("clock_timer", "clock_timer_running", {"click": 1})

    scr.append(screen("camera", [bar("Camera"), *grid(["Shutter", "Switch", "Gallery"], top=1400)], back="home"))
    scr.append(screen("camera_shot", [bar("Photo taken")], back="camera"))
    t("home", "camera", {"click": 7})
    t("camera", "camera_shot", {"click": 1})

    scr.append(screen("photos", [bar("Photos"), *grid(["Photo 1", "Photo 2", "Photo 3"], top=260)], back="home"))
    scr.append(screen("photos_view", [bar("Photo"), *grid(["Share", "Delete"], top=1500)], back="photos"))
    t("home", "photos", {"click": 8})
    t("photos", "photos_view", {"click": 1})

    scr.append(screen("youtube", [bar("Search YouTube"), *rows(["Video 1", "Video 2"], top=260)], back="home"))
    scr.append(screen("youtube_edit", [bar("Search field")], back="youtube"))
    scr.append(screen("youtube_results", [bar("Search YouTube"), *rows(["Result video"], top=260)],
                      back="youtube"))
    t("home", "youtube", {"click": 9})
    t("youtube", "youtube_edit", {"click": 0})
    t("youtube_edit", "youtube_results", {"type": ""})

    scr.append(screen("icon_menu", [bar("App info"), *rows(["Uninstall", "Widgets"], top=260)], back="home"))
    t("home", "icon_menu", {"longpress": 1})

    return {"name": "phone", "home": "home", "width": W, "height": H, "screens": scr, "transitions": tr}


def phone_tasks(space):
    """Tasks over the phone app. Odyssey has no enter/task_complete, so demos differ."""
    commit = [] if space == "gui_odyssey" else [ENTER]
    done = [] if space == "gui_odyssey" else [DONE]
    tasks = []

    def add(tid, instr, goal, demo, slack=3):
        body = demo + done
        tasks.append({"id": tid, "instruction": instr, "space": space, "max_turns": len(body) + slack,
                      "goal": goal, "demo": body})

    for q in ["walmart", "weather tomorrow", "nba scores", "cheap flights"]:
        add("google_" + q.split()[0], f"Search Google for {q}",
            {"screen": "google_results", "typed_contains": [q]}, [click(0), type_(q)] + commit)
    for q in ["wikipedia.org", "news.ycombinator.com", "github.com"]:
        add("chrome_" + q.split(".")[0], f"Open {q} in Chrome",
            {"screen": "chrome_results", "typed_contains": [q]}, [click(1), click(0), type_(q)] + commit)
    add("chrome_tabs", "Show my open tabs in Chrome", {"screen": "chrome_tabs"}, [click(1), click(1)])
    add("chrome_bookmarks", "Open Chrome bookmarks", {"screen": "chrome_bookmarks"}, [click(1), click(3)])
    add("wifi_on", "Turn on Wi-Fi", {"screen": "wifi_on"}, [click(2), click(1), click(1)])
    add("dark_mode", "Enable dark theme", {"screen": "dark_mode_on"}, [click(2), click(3), click(1)])
    add("battery_saver", "Turn on battery saver", {"screen": "battery_saver_on"}, [click(2), click(5), click(1)])
    add("about_phone", "Open the About phone page", {"screen": "settings_about"},
        [click(2), scroll("down"), click(5)])
    add("storage", "Check storage usage", {"screen": "settings_storage"}, [click(2), scroll("down"), click(2)])
    for q in ["coffee shops", "gas station"]:
        add("maps_" + q.split()[0], f"Find {q} nearby on Maps",
            {"screen": "maps_results", "typed_contains": [q]}, [click(3), click(0), type_(q)] + commit)
    add("maps_route", "Get directions to the nearest coffee shop",
        {"screen": "maps_route", "typed_contains": ["coffee"]}, [click(3), click(0), type_("coffee")] + commit +
        [click(1)])
    add("play_install", "Install Duolingo from the Play Store",
        {"screen": "play_installing", "typed_contains": ["duolingo"]},
        [click(4), click(0), type_("duolingo")] + commit + [click(1), click(1)])
    add("gmail_send", "Send the draft email", {"screen": "gmail_sent"}, [click(5), click(2), click(2)])
    add("alarm", "Set a new alarm", {"screen": "clock_alarm_set"}, [click(6), click(1), click(1)])
    add("timer", "Start a timer", {"screen": "clock_timer_running"}, [click(6), click(2), click(1)])
    add("photo", "Take a photo", {"screen": "camera_shot"}, [click(7), click(1)])
    add("view_photo", "Open the first photo in the gallery", {"screen": "photos_view"}, [click(8), click(1)])
    add("youtube_search", "Search YouTube for lofi music",
        {"screen": "youtube_results", "typed_contains": ["lofi music"]},
        [click(9), click(0), type_("lofi music")] + commit)
    if space == "gui_odyssey":
        # Cross-app tasks: goal needs screens from two apps.
        add("cross_search_then_alarm", "Look up sunrise time, then set an alarm",
            {"screen": "clock_alarm_set", "typed_contains": ["sunrise time"], "visited": ["google_results"]},
            [click(0), type_("sunrise time"), HOME, click(6), click(1), click(1)])
        add("cross_maps_then_photo", "Find a park on Maps, then take a photo",
            {"screen": "camera_shot", "typed_contains": ["park"], "visited": ["maps_results"]},
            [click(3), click(0), type_("park"), HOME, click(7), click(1)])
        add("app_info", "Open app info for Chrome", {"screen": "icon_menu"}, [longpress(1)])
    return tasks


# Shopping site for the element-level suite.

CATEGORIES = ["Laptops", "Phones", "Headphones", "Cameras", "Books"]


def shop_app():
    scr = []
    tr = []

    def t(a, b, on):
        tr.append({"from": a, "to": b, "on": on})

    scr.append(screen("home", [bar("Search products"), *rows(CATEGORIES, top=260)]))
    scr.append(screen("results", [bar("Search products"), *rows(["Item 1", "Item 2", "Item 3", "Sort by price"],
                                                                top=260)], back="home"))
    scr.append(screen("results_sorted", [bar("Search products"), *rows(["Cheapest item", "Item 2"], top=260)],
                      back="results"))
    scr.append(screen("product", [bar("Product"), *grid(["Add to cart", "Buy now", "Reviews"], top=900)],
                      back="results"))
    scr.append(screen("cart", [bar("Cart"), *rows(["Checkout", "Continue shopping"], top=260)], back="product"))
    scr.append(screen("checkout", [bar("Shipping address"), *rows(["Place order"], top=260)], back="cart"))
    scr.append(screen("order_placed", [bar("Order placed")], back="home"))
    scr.append(screen("reviews", [bar("Reviews"), *rows(["Most helpful", "Newest"], top=260)], back="product"))
    for i, c in enumerate(CATEGORIES, start=1):
        t("home", "results", {"click": i})
    t("home", "results", {"type": "", "label": 0})
    t("results", "results_sorted", {"click": 4})
    for i in (1, 2, 3):
        t("results", "product", {"click": i})
    t("results_sorted", "product", {"click": 1})
    t("product", "cart", {"click": 1})
    t("product", "checkout", {"click": 2})
    t("product", "reviews", {"click": 3})
    t("cart", "checkout", {"click": 1})
    t("checkout", "order_placed", {"type": "", "label": 0})
    return {"name": "shop", "home": "home", "width": W, "height": H, "screens": scr, "transitions": tr}


def shop_tasks():
    tasks = []

    def add(tid, instr, goal, demo):
        tasks.append({"id": tid, "instruction": instr, "space": "mind2web", "max_turns": len(demo) + 3,
                      "goal": goal, "demo": demo})

    items = ["gaming laptop", "usb c cable", "noise cancelling headphones", "mirrorless camera", "sci fi novel",
             "phone case", "mechanical keyboard"]
    for q in items:
        slug = q.replace(" ", "_")
        add("cart_" + slug, f"Add a {q} to the cart",
            {"screen": "cart", "typed_contains": [q]}, [type_(q, 0), click(1), click(1)])
    for q in items[:5]:
        slug = q.replace(" ", "_")
        add("cheapest_" + slug, f"Open the cheapest {q}",
            {"screen": "product", "typed_contains": [q], "visited": ["results_sorted"]},
            [type_(q, 0), click(4), click(1)])
    for i, c in enumerate(CATEGORIES, start=1):
        add("reviews_" + c.lower(), f"Read reviews of a popular item in {c}",
            {"screen": "reviews"}, [click(i), click(2), click(3)])
    for q in ["desk lamp", "water bottle", "yoga mat"]:
        slug = q.replace(" ", "_")
        add("order_" + slug, f"Buy a {q} and ship it to 12 Main Street",
            {"screen": "order_placed", "typed_contains": [q, "12 main street"]},
            [type_(q, 0), click(1), click(2), type_("12 Main Street", 0)])
    return tasks


# Strategy-gap suite: screens without left/right scrolls, so left/right
# distractors are no-ops.

def gap_suite():
    app = phone_app()
    tasks = []
    demos = [
        ("gap_wifi", "Turn on Wi-Fi", {"screen": "wifi_on"}, [click(2), click(1), click(1), DONE]),
        ("gap_alarm", "Set a new alarm", {"screen": "clock_alarm_set"}, [click(6), click(1), click(1), DONE]),
        ("gap_tabs", "Show my open tabs in Chrome", {"screen": "chrome_tabs"}, [click(1), click(1), DONE]),
        ("gap_search", "Search Google for walmart", {"screen": "google_results", "typed_contains": ["walmart"]},
         [click(0), type_("walmart"), ENTER, DONE]),
        ("gap_gmail", "Send the draft email", {"screen": "gmail_sent"}, [click(5), click(2), click(2), DONE]),
    ]
    for tid, instr, goal, demo in demos:
        tasks.append({"id": tid, "instruction": instr, "space": "aitw", "max_turns": len(demo) + 2, "goal": goal,
                      "demo": demo})
    return {"schema_version": 1, "app": app, "tasks": tasks}


# Reflection-unlock suite: the target app sits one scroll down inside the app
# drawer; a blind first attempt fails and the reflected attempt succeeds.

def drawer_suite():
    drawer_top = ["Calendar", "Contacts", "Files", "Messages", "Notes", "Phone"]
    drawer_more = ["Calculator", "Recorder", "Weather", "Translate"]
    app = {
        "name": "drawer",
        "home": "home",
        "width": W,
        "height": H,
        "screens": [
            screen("home", [bar("Search"), *grid(["Phone", "Messages", "Chrome", "App drawer"], top=1400)]),
            screen("drawer", [bar("Search apps"), *grid(drawer_top, top=260)], back="home"),
            screen("drawer_more", [bar("Search apps"), *grid(drawer_more, top=260)], back="home"),
            screen("calculator", [bar("Calculator")], back="home"),
            screen("recorder", [bar("Recorder"), *rows(["Record"], top=260)], back="home"),
            screen("recording", [bar("Recording")], back="recorder"),
            screen("weather", [bar("Weather")], back="home"),
            screen("notes", [bar("Notes")], back="home"),
        ],
        "transitions": [
            {"from": "home", "to": "drawer", "on": {"click": 4}},
            {"from": "drawer", "to": "drawer_more", "on": {"scroll": "down"}},
            {"from": "drawer_more", "to": "drawer", "on": {"scroll": "up"}},
            {"from": "drawer_more", "to": "calculator", "on": {"click": 1}},
            {"from": "drawer_more", "to": "recorder", "on": {"click": 2}},
            {"from": "recorder", "to": "recording", "on": {"click": 1}},
            {"from": "drawer_more", "to": "weather", "on": {"click": 3}},
            {"from": "drawer", "to": "notes", "on": {"click": 5}},
        ],
    }
    tasks = [
        {"id": "open_calculator", "instruction": "Open the Calculator app", "space": "aitw", "max_turns": 6,
         "goal": {"screen": "calculator"}, "demo": [click(4), scroll("down"), click(1), DONE]},
        {"id": "start_recording", "instruction": "Start a voice recording", "space": "aitw", "max_turns": 7,
         "goal": {"screen": "recording"}, "demo": [click(4), scroll("down"), click(2), click(1), DONE]},
        {"id": "open_weather", "instruction": "Open the Weather app", "space": "aitw", "max_turns": 6,
         "goal": {"screen": "weather"}, "demo": [click(4), scroll("down"), click(3), DONE]},
        {"id": "open_notes", "instruction": "Open Notes", "space": "aitw", "max_turns": 5,
         "goal": {"screen": "notes"}, "demo": [click(4), click(5), DONE]},
    ]
    return {"schema_version": 1, "app": app, "tasks": tasks}


def cand(action, why, p):
    return {"action": action, "rationale": why, "confidence": p}


def drawer_policy():
    """Scripted candidates. First attempts look on the first drawer page only."""
    blind = {
        "open_calculator": [
            [cand(click(4), "The app is probably in the drawer.", 0.8)],
            [cand(click(3), "Files might hold a calculator.", 0.4)],
            [cand(DONE, "Nothing else to try.", 0.2)],
        ],
        "start_recording": [
            [cand(click(4), "Open the drawer.", 0.8)],
            [cand(click(4), "Messages may record audio.", 0.3)],
            [cand(DONE, "Done.", 0.2)],
        ],
        "open_weather": [
            [cand(click(0), "Search for weather.", 0.5)],
            [cand(DONE, "Done.", 0.2)],
        ],
    }
    reflected = {
        "open_calculator": [
            [cand(click(4), "Open the drawer again.", 0.9)],
            [cand(scroll("down"), "The first page did not have it; scroll down.", 0.8)],
            [cand(click(1), "Calculator is visible now.", 0.9)],
            [cand(DONE, "Calculator is open.", 0.9)],
        ],
        "start_recording": [
            [cand(click(4), "Open the drawer.", 0.9)],
            [cand(scroll("down"), "Look past the first page.", 0.8)],
            [cand(click(2), "Recorder.", 0.9)],
            [cand(click(1), "Press record.", 0.9)],
            [cand(DONE, "Recording.", 0.9)],
        ],
        # Still wrong after reflecting: stays a failure under every budget.
        "open_weather": [
            [cand(click(0), "Search again.", 0.5)],
            [cand(DONE, "Done.", 0.2)],
        ],
    }
    solved = {
        "open_notes": [
            [cand(click(4), "Open the drawer.", 0.9)],
            [cand(click(5), "Notes is on the first page.", 0.9)],
            [cand(DONE, "Notes is open.", 0.9)],
        ],
    }
    scripts = []
    for tid in ["open_calculator", "start_recording", "open_weather"]:
        scripts.append({"task_id": tid, "steps": blind[tid], "reflected_steps": reflected[tid]})
    scripts.append({"task_id": "open_notes", "steps": solved["open_notes"]})
    return {"scripts": scripts}


def main():
    write("search_app.json", search_app())
    phone = phone_app()
    write("suite_aitw.json", {"schema_version": 1, "app": phone, "tasks": phone_tasks("aitw")})
    write("suite_odyssey.json", {"schema_version": 1, "app": phone, "tasks": phone_tasks("gui_odyssey")})
    write("suite_mind2web.json", {"schema_version": 1, "app": shop_app(), "tasks": shop_tasks()})
    write("strategy_gap.json", gap_suite())
    write("reflection_unlock.json", drawer_suite())
    write("reflection_unlock_policy.json", drawer_policy())


if __name__ == "__main__":
    main()
