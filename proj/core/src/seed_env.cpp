#include "evobench/seed_env.hpp"

#include <cctype>
#include <cstdio>

namespace evobench {

namespace {

struct AttrSpec {
  const char* name;
  const char* type;
  const char* description;
  bool pk = false;
  bool fk = false;
  bool modifiable = true;
  std::vector<Json> allowed = {};
};

void add_database(EnvGraph& g, const std::string& db, const std::vector<AttrSpec>& attrs) {
  for (const auto& a : attrs) {
    AttributeNode node;
    node.id = {db, a.name};
    node.value_type = ValueType::parse(a.type);
    node.description = a.description;
    node.is_primary_key = a.pk;
    node.is_foreign_key = a.fk;
    node.modifiable = a.modifiable;
    node.allowed_values = a.allowed;
    g.add_node(std::move(node));
  }
}

void add_edge(EnvGraph& g, const std::string& source, const std::string& target,
              Relationship rel, Cardinality card, std::vector<std::string> tools,
              const std::string& description) {
  RelationEdge e;
  e.source = NodeId::parse(source);
  e.target = NodeId::parse(target);
  e.relationship = rel;
  e.cardinality = card;
  e.tools = std::move(tools);
  e.description = description;
  g.add_edge(std::move(e));
}

/// PK -> attribute has_attribute edges, optionally carrying a per-attribute
/// tool list.
void describe(EnvGraph& g, const std::string& pk,
              const std::vector<std::pair<std::string, std::vector<std::string>>>& attrs) {
  NodeId key = NodeId::parse(pk);
  for (const auto& [attr, tools] : attrs) {
    add_edge(g, pk, key.database + "." + attr, Relationship::HasAttribute,
             Cardinality::OneToOne, tools, key.database + " record field " + attr);
  }
}

void add_tool(EnvGraph& g, const std::string& name, ToolKind kind,
              std::vector<std::string> inputs, std::vector<std::string> outputs,
              std::vector<std::string> optional, const std::string& description) {
  ToolSpec t;
  t.name = name;
  t.kind = kind;
  for (const auto& s : inputs) t.inputs.push_back(NodeId::parse(s));
  for (const auto& s : outputs) t.outputs.push_back(NodeId::parse(s));
  for (const auto& s : optional) t.optional_inputs.push_back(NodeId::parse(s));
  t.description = description;
  g.add_tool(std::move(t));
}

void build_core_databases(EnvGraph& g) {
  add_database(g, "User",
               {{"user_id", "str", "Unique user identifier", true},
                {"email", "str", "Login email address"},
                {"name", "str", "Display name"},
                {"address", "str", "Default shipping address"},
                {"cart_id", "Optional[str]", "Active cart for this user", false, true},
                {"order_ids", "List[str]", "Orders placed by this user", false, true}});

  add_database(g, "Product",
               {{"asin", "str", "Catalog identifier", true},
                {"title", "str", "Product title"},
                {"price", "float", "Current list price"},
                {"variants", "List[str]", "Purchasable variant labels"},
                {"category", "str", "Top-level category", false, false, true,
                 {Json("electronics"), Json("home"), Json("apparel"), Json("outdoors"),
                  Json("toys")}},
                {"stock", "int", "Units on hand"}});

  add_database(g, "Order",
               {{"order_id", "str", "Order identifier", true},
                {"user_id", "str", "Purchasing user", false, true},
                {"items", "List[str]", "Ordered item descriptors"},
                {"status", "str", "Fulfilment state", false, false, true,
                 {Json("pending"), Json("shipped"), Json("delivered"), Json("cancelled")}},
                {"total", "float", "Charged amount"},
                {"exchange_return_request_ids", "List[str]",
                 "Exchange or return requests raised against this order", false, true}});

  add_database(g, "Cart",
               {{"cart_id", "str", "Cart identifier", true},
                {"user_id", "str", "Owning user", false, true},
                {"items", "List[str]", "Cart item references", false, true},
                {"created_at", "str", "Creation timestamp"},
                {"updated_at", "str", "Last update timestamp"}});

  add_database(g, "CartItem",
               {{"cart_item_id", "str", "Cart line identifier", true},
                {"product_id", "str", "Product in this line", false, true},
                {"variant_id", "str", "Chosen variant label"},
                {"quantity", "int", "Units requested"}});

  add_database(g, "ExchangeReturnRequest",
               {{"request_id", "str", "Request identifier", true},
                {"order_id", "str", "Order under dispute", false, true},
                {"request_type", "str", "What the customer wants", false, false, true,
                 {Json("exchange"), Json("return")}},
                {"new_variant", "Optional[str]", "Replacement variant for exchanges"},
                {"refund_amount", "float", "Amount credited back"},
                {"status", "str", "Processing state", false, false, true,
                 {Json("requested"), Json("approved"), Json("completed")}}});

  add_database(g, "Review",
               {{"review_id", "str", "Review identifier", true},
                {"user_id", "str", "Author", false, true},
                {"product_id", "str", "Reviewed product", false, true},
                {"rating", "int", "Stars, 1 to 5"},
                {"comment", "str", "Free-text review body"}});

  add_database(g, "Shipment",
               {{"shipment_id", "str", "Shipment identifier", true},
                {"order_id", "str", "Order being delivered", false, true},
                {"carrier", "str", "Carrier handling delivery", false, false, true,
                 {Json("UPS"), Json("FedEx"), Json("USPS"), Json("DHL")}},
                {"tracking_number", "str", "Carrier tracking code"},
                {"delivery_status", "str", "Delivery progress", false, false, true,
                 {Json("label_created"), Json("in_transit"), Json("out_for_delivery"),
                  Json("delivered")}}});
}

void build_core_edges(EnvGraph& g) {
  // User. cart_id and order_ids connect through their own relation edges.
  describe(g, "User.user_id",
           {{"email", {"get_user_profile"}},
            {"name", {"get_user_profile"}},
            {"address", {"get_user_profile"}},
            {"order_ids", {}}});
  add_edge(g, "User.email", "User.user_id", Relationship::Identifies,
           Cardinality::OneToOne, {"authenticate_user"}, "Email resolves the account");
  add_edge(g, "User.order_ids", "Order.order_id", Relationship::References,
           Cardinality::OneToMany, {}, "Order history back-references");
  add_edge(g, "User.user_id", "Order.order_id", Relationship::LinksTo,
           Cardinality::OneToMany, {"get_user_orders"}, "Orders placed by the user");

  describe(g, "Product.asin",
           {{"title", {"get_product_by_id"}},
            {"price", {"get_product_by_id"}},
            {"variants", {"get_product_by_id"}},
            {"category", {}},
            {"stock", {}}});
  add_edge(g, "Product.title", "Product.asin", Relationship::Identifies,
           Cardinality::OneToOne, {"search_products"}, "Title lookup resolves products");

  describe(g, "Order.order_id",
           {{"user_id", {}},
            {"items", {"get_order_by_id"}},
            {"status", {"get_order_by_id"}},
            {"total", {"get_order_by_id"}},
            {"exchange_return_request_ids", {}}});
  add_edge(g, "Order.user_id", "User.user_id", Relationship::References,
           Cardinality::ManyToOne, {}, "Order belongs to a user");
  add_edge(g, "Order.exchange_return_request_ids", "ExchangeReturnRequest.request_id",
           Relationship::Contains, Cardinality::OneToMany, {},
           "Requests raised against this order");

  // Cart carries exactly these seven edges: timestamps stay unwired so that
  // retiring the database removes 5 nodes / 7 edges / 5 tools.
  add_edge(g, "Product.asin", "Cart.items", Relationship::Updates,
           Cardinality::ManyToMany, {"add_to_cart"}, "Products get placed into carts");
  add_edge(g, "Cart.cart_id", "Cart.user_id", Relationship::HasAttribute,
           Cardinality::OneToOne, {}, "Cart record field user_id");
  add_edge(g, "Cart.cart_id", "Cart.items", Relationship::HasAttribute,
           Cardinality::OneToOne, {}, "Cart record field items");
  add_edge(g, "Cart.user_id", "User.user_id", Relationship::References,
           Cardinality::ManyToOne, {"get_cart", "add_to_cart", "clear_cart"},
           "Cart belongs to a user");
  add_edge(g, "Cart.items", "CartItem.cart_item_id", Relationship::Contains,
           Cardinality::OneToMany, {"remove_from_cart", "update_cart_item"},
           "Cart lines referenced from the cart");
  add_edge(g, "User.user_id", "Cart.items", Relationship::LinksTo,
           Cardinality::OneToOne, {"get_cart", "add_to_cart", "clear_cart"},
           "A user's current cart contents");
  add_edge(g, "User.cart_id", "Cart.cart_id", Relationship::References,
           Cardinality::OneToOne, {}, "Active cart back-reference");

  describe(g, "CartItem.cart_item_id",
           {{"product_id", {}}, {"variant_id", {}}, {"quantity", {}}});
  add_edge(g, "CartItem.product_id", "Product.asin", Relationship::References,
           Cardinality::ManyToOne, {}, "Cart line points at a product");

  describe(g, "ExchangeReturnRequest.request_id",
           {{"order_id", {}},
            {"request_type", {"get_exchange_request"}},
            {"new_variant", {"get_exchange_request"}},
            {"refund_amount", {"get_exchange_request"}},
            {"status", {"get_exchange_request"}}});
  add_edge(g, "ExchangeReturnRequest.order_id", "Order.order_id",
           Relationship::References, Cardinality::ManyToOne, {},
           "Request belongs to an order");
  add_edge(g, "Order.order_id", "ExchangeReturnRequest.request_id",
           Relationship::Updates, Cardinality::OneToMany, {"initiate_exchange"},
           "Disputes opened against the order");

  describe(g, "Review.review_id",
           {{"user_id", {}},
            {"product_id", {}},
            {"rating", {"get_product_reviews"}},
            {"comment", {"get_product_reviews"}}});
  add_edge(g, "Review.user_id", "User.user_id", Relationship::References,
           Cardinality::ManyToOne, {}, "Review author");
  add_edge(g, "Review.product_id", "Product.asin", Relationship::References,
           Cardinality::ManyToOne, {}, "Reviewed product");
  add_edge(g, "Product.asin", "Review.review_id", Relationship::LinksTo,
           Cardinality::OneToMany, {"get_product_reviews"}, "Reviews of the product");

  describe(g, "Shipment.shipment_id",
           {{"order_id", {}},
            {"carrier", {"get_shipment_by_order"}},
            {"tracking_number", {"get_shipment_by_order"}},
            {"delivery_status", {"get_shipment_by_order"}}});
  add_edge(g, "Shipment.order_id", "Order.order_id", Relationship::References,
           Cardinality::ManyToOne, {}, "Shipment fulfils an order");
  add_edge(g, "Order.order_id", "Shipment.shipment_id", Relationship::LinksTo,
           Cardinality::OneToMany, {"get_shipment_by_order"}, "Shipments for the order");
}

void build_core_tools(EnvGraph& g) {
  add_tool(g, "authenticate_user", ToolKind::Read, {"User.email"},
           {"User.user_id", "User.name"}, {},
           "Resolve an account from its login email");
  add_tool(g, "get_user_profile", ToolKind::Read, {"User.user_id"},
           {"User.email", "User.name", "User.address"}, {},
           "Fetch profile fields for a user");
  add_tool(g, "get_user_orders", ToolKind::Read, {"User.user_id"},
           {"Order.order_id", "Order.status", "Order.total"}, {},
           "List orders placed by a user");
  add_tool(g, "get_order_by_id", ToolKind::Read, {"Order.order_id"},
           {"Order.items", "Order.status", "Order.total", "Order.user_id"}, {},
           "Fetch one order with its line items");
  add_tool(g, "get_product_by_id", ToolKind::Read, {"Product.asin"},
           {"Product.title", "Product.price", "Product.variants"}, {},
           "Fetch catalog data for a product");
  add_tool(g, "search_products", ToolKind::Read, {"Product.title"},
           {"Product.asin", "Product.price"}, {},
           "Find products whose title matches");
  add_tool(g, "get_product_reviews", ToolKind::Read, {"Product.asin"},
           {"Review.review_id", "Review.rating", "Review.comment"}, {},
           "Reviews left on a product");
  add_tool(g, "get_cart", ToolKind::Read, {"User.user_id"},
           {"Cart.cart_id", "Cart.items"}, {}, "Fetch the user's active cart");
  add_tool(g, "add_to_cart", ToolKind::Write,
           {"User.user_id", "Product.asin", "CartItem.variant_id", "CartItem.quantity"},
           {"Cart.cart_id", "Cart.items"},
           {"CartItem.variant_id", "CartItem.quantity"},
           "Put a product into the user's cart");
  add_tool(g, "update_cart_item", ToolKind::Write,
           {"User.user_id", "CartItem.cart_item_id", "CartItem.quantity"},
           {"CartItem.cart_item_id", "CartItem.quantity"}, {},
           "Change the quantity on a cart line");
  add_tool(g, "remove_from_cart", ToolKind::Write,
           {"User.user_id", "CartItem.cart_item_id"}, {"Cart.cart_id", "Cart.items"}, {},
           "Take a line out of the user's cart");
  add_tool(g, "clear_cart", ToolKind::Write, {"User.user_id"},
           {"Cart.cart_id", "Cart.items"}, {}, "Empty the user's cart");
  add_tool(g, "initiate_exchange", ToolKind::Write,
           {"Order.order_id", "ExchangeReturnRequest.request_type",
            "ExchangeReturnRequest.new_variant"},
           {"ExchangeReturnRequest.request_id", "ExchangeReturnRequest.status",
            "ExchangeReturnRequest.request_type", "ExchangeReturnRequest.new_variant"},
           {"ExchangeReturnRequest.new_variant"},
           "Open an exchange or return for an order");
  add_tool(g, "get_exchange_request", ToolKind::Read,
           {"ExchangeReturnRequest.request_id"},
           {"ExchangeReturnRequest.request_type", "ExchangeReturnRequest.refund_amount",
            "ExchangeReturnRequest.status"},
           {}, "Fetch one exchange or return request");
  add_tool(g, "get_shipment_by_order", ToolKind::Read, {"Order.order_id"},
           {"Shipment.shipment_id", "Shipment.carrier", "Shipment.tracking_number",
            "Shipment.delivery_status"},
           {}, "Delivery progress for an order");
}

void build_paper_extensions(EnvGraph& g) {
  AttributeNode rating;
  rating.id = {"Product", "rating"};
  rating.value_type = ValueType::parse("float");
  rating.description = "Average review score";
  g.add_node(rating);
  add_edge(g, "Product.asin", "Product.rating", Relationship::HasAttribute,
           Cardinality::OneToOne, {"get_product_rating"}, "Product record field rating");

  add_database(g, "Wishlist",
               {{"wishlist_id", "str", "Wishlist identifier", true},
                {"user_id", "str", "Owning user", false, true},
                {"product_ids", "List[str]", "Saved products", false, true},
                {"created_at", "str", "Creation timestamp"}});
  describe(g, "Wishlist.wishlist_id",
           {{"user_id", {}}, {"product_ids", {"get_wishlist"}}, {"created_at", {}}});
  add_edge(g, "Wishlist.user_id", "User.user_id", Relationship::References,
           Cardinality::ManyToOne, {}, "Wishlist belongs to a user");
  add_edge(g, "Wishlist.product_ids", "Product.asin", Relationship::Contains,
           Cardinality::OneToMany, {}, "Saved product references");
  add_edge(g, "User.user_id", "Wishlist.wishlist_id", Relationship::LinksTo,
           Cardinality::OneToMany, {"get_wishlist", "add_to_wishlist", "remove_from_wishlist"},
           "The user's wishlists");

  add_database(g, "Subscription",
               {{"subscription_id", "str", "Subscription identifier", true},
                {"user_id", "str", "Subscribing user", false, true},
                {"product_id", "str", "Delivered product", false, true},
                {"frequency", "str", "Delivery cadence", false, false, true,
                 {Json("weekly"), Json("biweekly"), Json("monthly")}},
                {"status", "str", "Subscription state", false, false, true,
                 {Json("active"), Json("paused"), Json("cancelled")}},
                {"next_delivery", "str", "Next scheduled delivery date"}});
  describe(g, "Subscription.subscription_id",
           {{"user_id", {}},
            {"product_id", {}},
            {"frequency", {"get_subscription_by_id"}},
            {"status", {"get_subscription_by_id"}},
            {"next_delivery", {"get_subscription_by_id"}}});
  add_edge(g, "Subscription.user_id", "User.user_id", Relationship::References,
           Cardinality::ManyToOne, {}, "Subscription belongs to a user");
  add_edge(g, "Subscription.product_id", "Product.asin", Relationship::References,
           Cardinality::ManyToOne, {}, "Product delivered on schedule");
  add_edge(g, "User.user_id", "Subscription.subscription_id", Relationship::LinksTo,
           Cardinality::OneToMany,
           {"get_user_subscriptions", "create_subscription", "update_subscription_status"},
           "The user's delivery subscriptions");

  add_database(g, "Notification",
               {{"notification_id", "str", "Notification identifier", true},
                {"user_id", "str", "Recipient", false, true},
                {"type", "str", "Notification class", false, false, true,
                 {Json("order_update"), Json("price_drop"), Json("promotion")}},
                {"message", "str", "Rendered message body"},
                {"read", "bool", "Whether the user has seen it"}});
  describe(g, "Notification.notification_id",
           {{"user_id", {}},
            {"type", {"get_user_notifications"}},
            {"message", {"get_user_notifications"}},
            {"read", {"mark_notification_read"}}});
  add_edge(g, "Notification.user_id", "User.user_id", Relationship::References,
           Cardinality::ManyToOne, {}, "Notification recipient");
  add_edge(g, "User.user_id", "Notification.notification_id", Relationship::LinksTo,
           Cardinality::OneToMany, {"get_user_notifications", "send_notification"},
           "Notifications delivered to the user");

  add_database(g, "PaymentMethod",
               {{"payment_method_id", "str", "Payment method identifier", true},
                {"user_id", "str", "Owning user", false, true},
                {"method_type", "str", "Instrument type", false, false, true,
                 {Json("credit_card"), Json("debit_card"), Json("bank_account")}},
                {"last_four", "str", "Last four digits"},
                {"is_default", "bool", "Default instrument flag"}});
  describe(g, "PaymentMethod.payment_method_id",
           {{"user_id", {}},
            {"method_type", {"get_payment_method_by_id"}},
            {"last_four", {"get_payment_method_by_id"}},
            {"is_default", {"set_default_payment"}}});
  add_edge(g, "PaymentMethod.user_id", "User.user_id", Relationship::References,
           Cardinality::ManyToOne, {}, "Instrument belongs to a user");
  add_edge(g, "User.user_id", "PaymentMethod.payment_method_id", Relationship::LinksTo,
           Cardinality::OneToMany, {"get_payment_methods", "add_payment_method"},
           "Payment instruments on file");
  add_edge(g, "User.user_id", "Review.review_id", Relationship::LinksTo,
           Cardinality::OneToMany, {}, "Reviews written by the user");

  add_tool(g, "get_wishlist", ToolKind::Read, {"User.user_id"},
           {"Wishlist.wishlist_id", "Wishlist.product_ids"}, {},
           "Fetch the user's wishlist");
  add_tool(g, "add_to_wishlist", ToolKind::Write, {"User.user_id", "Product.asin"},
           {"Wishlist.wishlist_id", "Wishlist.product_ids"}, {},
           "Save a product to the wishlist");
  add_tool(g, "remove_from_wishlist", ToolKind::Write, {"User.user_id", "Product.asin"},
           {"Wishlist.wishlist_id", "Wishlist.product_ids"}, {},
           "Drop a product from the wishlist");
  add_tool(g, "get_wishlist_products", ToolKind::Read, {"User.user_id"},
           {"Product.asin", "Product.title"}, {},
           "Catalog entries saved on the user's wishlist");

  add_tool(g, "create_subscription", ToolKind::Write,
           {"User.user_id", "Product.asin", "Subscription.frequency"},
           {"Subscription.subscription_id", "Subscription.status", "Subscription.frequency"},
           {}, "Start a recurring delivery");
  add_tool(g, "get_user_subscriptions", ToolKind::Read, {"User.user_id"},
           {"Subscription.subscription_id", "Subscription.status", "Subscription.frequency"},
           {}, "List the user's subscriptions");
  add_tool(g, "update_subscription_status", ToolKind::Write,
           {"Subscription.subscription_id", "Subscription.status"},
           {"Subscription.subscription_id", "Subscription.status"}, {},
           "Pause, resume, or cancel a subscription");
  add_tool(g, "get_subscription_by_id", ToolKind::Read, {"Subscription.subscription_id"},
           {"Subscription.frequency", "Subscription.status", "Subscription.next_delivery"},
           {}, "Fetch one subscription");
  add_tool(g, "get_subscription_products", ToolKind::Read, {"User.user_id"},
           {"Product.asin", "Product.title"}, {},
           "Products the user receives on schedule");

  add_tool(g, "get_user_notifications", ToolKind::Read, {"User.user_id"},
           {"Notification.notification_id", "Notification.type", "Notification.message"},
           {}, "Unread and recent notifications");
  add_tool(g, "send_notification", ToolKind::Write,
           {"User.user_id", "Notification.type", "Notification.message"},
           {"Notification.notification_id", "Notification.type"}, {},
           "Deliver a notification to a user");
  add_tool(g, "mark_notification_read", ToolKind::Write, {"Notification.notification_id"},
           {"Notification.notification_id", "Notification.read"}, {},
           "Mark one notification as seen");

  add_tool(g, "get_payment_methods", ToolKind::Read, {"User.user_id"},
           {"PaymentMethod.payment_method_id", "PaymentMethod.method_type",
            "PaymentMethod.last_four"},
           {}, "Payment instruments on file");
  add_tool(g, "add_payment_method", ToolKind::Write,
           {"User.user_id", "PaymentMethod.method_type", "PaymentMethod.last_four"},
           {"PaymentMethod.payment_method_id", "PaymentMethod.method_type"}, {},
           "Store a new payment instrument");
  add_tool(g, "set_default_payment", ToolKind::Write, {"PaymentMethod.payment_method_id"},
           {"PaymentMethod.payment_method_id", "PaymentMethod.is_default"}, {},
           "Make an instrument the default");
  add_tool(g, "get_payment_method_by_id", ToolKind::Read,
           {"PaymentMethod.payment_method_id"},
           {"PaymentMethod.method_type", "PaymentMethod.last_four"}, {},
           "Fetch one payment instrument");

  add_tool(g, "get_product_stock", ToolKind::Read, {"Product.asin"}, {"Product.stock"},
           {}, "Units on hand for a product");
  add_tool(g, "get_product_rating", ToolKind::Read, {"Product.asin"}, {"Product.rating"},
           {}, "Average review score for a product");
  add_tool(g, "get_product_variants", ToolKind::Read, {"Product.asin"},
           {"Product.variants"}, {}, "Variant labels for a product");
  add_tool(g, "search_products_by_category", ToolKind::Read, {"Product.category"},
           {"Product.asin", "Product.title", "Product.price"}, {},
           "Browse the catalog by category");

  add_tool(g, "get_order_status", ToolKind::Read, {"Order.order_id"}, {"Order.status"},
           {}, "Fulfilment state of an order");
  add_tool(g, "get_order_total", ToolKind::Read, {"Order.order_id"}, {"Order.total"},
           {}, "Charged amount for an order");
  add_tool(g, "cancel_order", ToolKind::Write, {"Order.order_id"},
           {"Order.order_id", "Order.status"}, {}, "Cancel an open order");
  add_tool(g, "get_order_exchange_requests", ToolKind::Read, {"Order.order_id"},
           {"ExchangeReturnRequest.request_id", "ExchangeReturnRequest.status"}, {},
           "Disputes raised against an order");
  add_tool(g, "list_user_orders_by_status", ToolKind::Read,
           {"User.user_id", "Order.status"}, {"Order.order_id", "Order.total"}, {},
           "Orders of a user in one fulfilment state");

  add_tool(g, "update_user_address", ToolKind::Write, {"User.user_id", "User.address"},
           {"User.user_id", "User.address"}, {}, "Change the default shipping address");
  add_tool(g, "get_user_by_id", ToolKind::Read, {"User.user_id"},
           {"User.name", "User.email"}, {}, "Fetch account basics");

  add_tool(g, "create_review", ToolKind::Write,
           {"User.user_id", "Product.asin", "Review.rating", "Review.comment"},
           {"Review.review_id", "Review.rating"}, {"Review.comment"},
           "Leave a review on a product");
  add_tool(g, "get_user_reviews", ToolKind::Read, {"User.user_id"},
           {"Review.review_id", "Review.rating"}, {}, "Reviews written by a user");
  add_tool(g, "get_review_by_id", ToolKind::Read, {"Review.review_id"},
           {"Review.rating", "Review.comment"}, {}, "Fetch one review");

  add_tool(g, "track_shipment", ToolKind::Read, {"Shipment.tracking_number"},
           {"Shipment.delivery_status", "Shipment.carrier"}, {},
           "Look up delivery progress by tracking code");
  add_tool(g, "get_shipment_status", ToolKind::Read, {"Shipment.shipment_id"},
           {"Shipment.delivery_status"}, {}, "Delivery state of a shipment");
  add_tool(g, "update_delivery_status", ToolKind::Write,
           {"Shipment.shipment_id", "Shipment.delivery_status"},
           {"Shipment.shipment_id", "Shipment.delivery_status"}, {},
           "Record a carrier scan");

  add_tool(g, "approve_exchange", ToolKind::Write, {"ExchangeReturnRequest.request_id"},
           {"ExchangeReturnRequest.request_id", "ExchangeReturnRequest.status"}, {},
           "Approve a pending request");
  add_tool(g, "complete_exchange", ToolKind::Write, {"ExchangeReturnRequest.request_id"},
           {"ExchangeReturnRequest.request_id", "ExchangeReturnRequest.status"}, {},
           "Close out an approved request");
  add_tool(g, "get_request_refund", ToolKind::Read, {"ExchangeReturnRequest.request_id"},
           {"ExchangeReturnRequest.refund_amount"}, {},
           "Credited amount for a request");

  // Attach the extra READ tools to the edges they travel.
  auto attach = [&g](const std::string& source, const std::string& target,
                     Relationship rel, const std::string& tool) {
    EdgeKey key{NodeId::parse(source), NodeId::parse(target), rel};
    auto tools = g.find_edge(key)->tools;
    tools.push_back(tool);
    g.set_edge_tools(key, tools);
  };
  attach("Product.asin", "Product.stock", Relationship::HasAttribute, "get_product_stock");
  attach("Product.asin", "Product.variants", Relationship::HasAttribute,
         "get_product_variants");
  attach("Product.asin", "Product.category", Relationship::HasAttribute,
         "search_products_by_category");
  attach("Order.order_id", "Order.status", Relationship::HasAttribute, "get_order_status");
  attach("Order.order_id", "Order.status", Relationship::HasAttribute, "cancel_order");
  attach("Order.order_id", "Order.total", Relationship::HasAttribute, "get_order_total");
  attach("User.user_id", "Order.order_id", Relationship::LinksTo,
         "list_user_orders_by_status");
  attach("Order.order_id", "ExchangeReturnRequest.request_id", Relationship::Updates,
         "get_order_exchange_requests");
  attach("ExchangeReturnRequest.request_id", "ExchangeReturnRequest.status",
         Relationship::HasAttribute, "approve_exchange");
  attach("ExchangeReturnRequest.request_id", "ExchangeReturnRequest.status",
         Relationship::HasAttribute, "complete_exchange");
  attach("ExchangeReturnRequest.request_id", "ExchangeReturnRequest.refund_amount",
         Relationship::HasAttribute, "get_request_refund");
  attach("User.user_id", "User.address", Relationship::HasAttribute,
         "update_user_address");
  attach("User.user_id", "User.name", Relationship::HasAttribute, "get_user_by_id");
  attach("Product.asin", "Review.review_id", Relationship::LinksTo, "create_review");
  attach("User.user_id", "Review.review_id", Relationship::LinksTo, "get_user_reviews");
  attach("Review.review_id", "Review.rating", Relationship::HasAttribute,
         "get_review_by_id");
  attach("Shipment.shipment_id", "Shipment.tracking_number", Relationship::HasAttribute,
         "track_shipment");
  attach("Shipment.shipment_id", "Shipment.delivery_status", Relationship::HasAttribute,
         "get_shipment_status");
  attach("Shipment.shipment_id", "Shipment.delivery_status", Relationship::HasAttribute,
         "update_delivery_status");
  attach("Wishlist.product_ids", "Product.asin", Relationship::Contains,
         "get_wishlist_products");
  attach("Subscription.product_id", "Product.asin", Relationship::References,
         "get_subscription_products");
}

}  // namespace

EnvGraph build_seed_graph(SeedScale scale) {
  EnvGraph g;
  g.set_version_id("G0");
  g.set_metadata("strategy", "seed");
  build_core_databases(g);
  build_core_edges(g);
  build_core_tools(g);
  if (scale == SeedScale::Paper) build_paper_extensions(g);
  return g;
}

namespace {

const std::vector<std::pair<const char*, const char*>>& name_bank() {
  static const std::vector<std::pair<const char*, const char*>> bank = {
      {"Susan", "Morales"},  {"James", "Okafor"},   {"Mei", "Tanaka"},
      {"Lucas", "Ferreira"}, {"Amara", "Diallo"},   {"Elena", "Petrova"},
      {"Noah", "Lindqvist"}, {"Priya", "Raman"},    {"Omar", "Haddad"},
      {"Grace", "Whitfield"}, {"Tomas", "Novak"},   {"Leila", "Nasser"},
      {"Ethan", "Brooks"},   {"Ines", "Moreau"},    {"Kwame", "Mensah"},
      {"Hana", "Kim"},       {"Viktor", "Antonov"}, {"Rosa", "Delgado"},
      {"Arjun", "Mehta"},    {"Clara", "Jensen"}};
  return bank;
}

const std::vector<const char*>& product_adjectives() {
  static const std::vector<const char*> bank = {
      "Compact", "Wireless", "Insulated", "Foldable", "Ergonomic", "Rechargeable",
      "Stainless", "Portable", "Adjustable", "Waterproof"};
  return bank;
}

const std::vector<const char*>& product_nouns() {
  static const std::vector<const char*> bank = {
      "Desk Lamp", "Water Bottle", "Backpack", "Keyboard", "Blender", "Tent",
      "Headphones", "Notebook", "Camera Tripod", "Coffee Grinder"};
  return bank;
}

const std::vector<const char*>& variant_bank() {
  static const std::vector<const char*> bank = {
      "grey_tag m", "purple_tag m", "grey_tag l", "purple_tag l",
      "black_tag s", "blue_tag s", "red_tag m", "green_tag l"};
  return bank;
}

std::string pad3(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", n);
  return buf;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Json synthetic_user(int index) {
  const auto& bank = name_bank();
  const auto& [first, last] = bank[static_cast<std::size_t>(index) % bank.size()];
  std::string user_id = "user_" + pad3(index + 1);
  Json u;
  u["user_id"] = user_id;
  u["email"] = lower(first) + "." + lower(last) + "." + user_id + "@example.com";
  u["name"] = std::string(first) + " " + last;
  u["address"] = std::to_string(100 + (index * 37) % 899) + " " +
                 std::string(product_nouns()[static_cast<std::size_t>(index) %
                                             product_nouns().size()]) +
                 " Street";
  u["cart_id"] = nullptr;
  u["order_ids"] = Json::array();
  return u;
}

Json synthetic_product(int index, Rng& rng) {
  static const char* alphanum = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string asin = "B0";
  for (int i = 0; i < 8; ++i) asin.push_back(alphanum[rng.uniform(36)]);
  Json p;
  p["asin"] = asin;
  p["title"] = std::string(product_adjectives()[static_cast<std::size_t>(
                   rng.uniform(product_adjectives().size()))]) +
               " " +
               product_nouns()[static_cast<std::size_t>(rng.uniform(product_nouns().size()))] +
               " " + pad3(index + 1);
  p["price"] = static_cast<double>(rng.range(500, 49999)) / 100.0;
  Json variants = Json::array();
  std::size_t start = static_cast<std::size_t>(rng.uniform(variant_bank().size()));
  int count = rng.range(2, 3);
  for (int i = 0; i < count; ++i) {
    variants.push_back(variant_bank()[(start + static_cast<std::size_t>(i) * 2) %
                                      variant_bank().size()]);
  }
  p["variants"] = variants;
  static const std::vector<const char*> categories = {"electronics", "home", "apparel",
                                                      "outdoors", "toys"};
  p["category"] = categories[static_cast<std::size_t>(rng.uniform(categories.size()))];
  p["stock"] = rng.range(0, 500);
  return p;
}

Json build_seed_store(SeedScale scale, std::uint64_t seed) {
  Rng rng(Rng::mix(seed, Rng::hash_label("seed_store")));
  int users = scale == SeedScale::Paper ? 50 : 10;
  int products = scale == SeedScale::Paper ? 1000 : 50;
  Json store;
  Json user_rows = Json::array();
  for (int i = 0; i < users; ++i) user_rows.push_back(synthetic_user(i));
  Json product_rows = Json::array();
  for (int i = 0; i < products; ++i) product_rows.push_back(synthetic_product(i, rng));
  store["User"] = user_rows;
  store["Product"] = product_rows;
  return store;
}

}  // namespace evobench
